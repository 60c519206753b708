"""Column generation pipeline and benchmark harness.

``solve`` runs: initial columns, then rounds of relaxed master solve, dual
extraction and column generation, then the integer master with the fleet
rows restored, then the repair loop that adds incompatibility cuts until
the schedule replays on time.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .heuristics import GAParams, VNSParams, ga_generate, insertion_init, simple_init, vns_generate
from .instance import Instance
from .lp import OPTIMAL, INFEASIBLE, MIPConfig, solve_lp, solve_mip
from .master import (ColumnPool, MasterModel, Schedule, add_incompatibility_cuts, build_rmp, extract_duals,
                     extract_solution)
from .pricing import ENUM, P1, P2, RANDOM, Estimator, price_by_enumeration, price_by_estimate, price_random_ablation
from .routing import (IncompatiblePair, Route, RouteBudgetExceeded, ServiceIndex, detect_incompatibilities,
                      enumerate_routes, is_distance_feasible, simulate_schedule)

log = logging.getLogger(__name__)

GENERATORS = ("enumerated", "vns", "ga")
INITS = ("simple", "insertion")
BACKEND_CHOICES = ("auto", "native", "highs")

# the dense native engine is used up to this many (rows x columns) cells
NATIVE_CELLS = 40_000


class InfeasibleModelError(RuntimeError):
    def __init__(self, message: str, stats: "RunStats"):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class ColGenConfig:
    pricing: str = P2
    generator: str = "enumerated"
    init: str = "simple"
    max_columns: int = 1000
    max_iterations: int = 30
    fleet_relaxed_during_colgen: bool = True
    seed: int = 0
    time_limit: float = 3600.0  # seconds for the column generation phase
    cut_rounds: int = 20
    backend: str = "auto"
    mip: MIPConfig = MIPConfig()
    vns: VNSParams | None = None
    ga: GAParams | None = None
    routes: tuple[Route, ...] | None = None  # explicit route set for the enumerated generator
    max_legs: int = 12
    max_routes: int = 500_000
    reprice_after_cuts: bool = False
    record_columns: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.max_columns < 1:
            raise ValueError("max_columns must be at least 1")
        if self.generator not in GENERATORS:
            raise ValueError(f"generator must be one of {GENERATORS}")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}")
        if self.pricing not in (P1, P2, ENUM, RANDOM):
            raise ValueError(f"unknown pricing {self.pricing!r}")
        if self.generator != "enumerated" and self.pricing not in (P1, P2):
            raise ValueError(f"the {self.generator} generator needs p1 or p2 pricing")
        if self.backend not in BACKEND_CHOICES:
            raise ValueError(f"backend must be one of {BACKEND_CHOICES}")
        if self.cut_rounds < 0:
            raise ValueError("cut_rounds must be non-negative")

    def label(self) -> str:
        return f"{self.generator}/{self.pricing}/{self.init}"


@dataclass
class IterationStats:
    iteration: int
    relaxed_objective: float
    columns_added: int
    pool_size: int
    min_estimate: float
    seconds: float


@dataclass
class EmittedColumn:
    iteration: int
    route: Route
    estimate: float
    distance_feasible: bool


@dataclass
class RunStats:
    status: str = "optimal"  # optimal | limit | incomplete | infeasible
    stop_reason: str = ""
    iterations: list[IterationStats] = field(default_factory=list)
    initial_columns: int = 0
    columns_generated: int = 0
    pool_size: int = 0
    pre_cut_objective: float = math.nan
    objective: float = math.nan
    cut_rounds: int = 0
    cut_count: int = 0
    solve_seconds: float = 0.0
    parse_seconds: float = 0.0
    mip_nodes: int = 0
    backend: str = ""
    notes: list[str] = field(default_factory=list)
    emitted: list[EmittedColumn] = field(default_factory=list)
    generator_pool_sizes: list[tuple[int, int]] = field(default_factory=list)  # (size, cap)

    @property
    def total_seconds(self) -> float:
        return self.solve_seconds + self.parse_seconds

    @property
    def relaxed_objectives(self) -> list[float]:
        return [it.relaxed_objective for it in self.iterations]

    def fingerprint(self) -> tuple:
        """Everything except wall-clock times."""
        its = tuple((i.iteration, round(i.relaxed_objective, 6), i.columns_added, i.pool_size,
                     round(i.min_estimate, 6) if math.isfinite(i.min_estimate) else i.min_estimate)
                    for i in self.iterations)
        return (self.status, self.stop_reason, its, self.columns_generated, self.pool_size,
                self.pre_cut_objective, self.objective, self.cut_rounds, self.cut_count)

    def summary_row(self) -> dict:
        return {"T": round(self.total_seconds, 3), "T_solve": round(self.solve_seconds, 3),
                "Col": self.columns_generated, "Obj": self.objective, "pre_cut": self.pre_cut_objective,
                "iterations": len(self.iterations), "cuts": self.cut_count, "cut_rounds": self.cut_rounds,
                "status": self.status}


# --------------------------------------------------------------------------
# pipeline


def _pick_backend(cfg: ColGenConfig, mm: MasterModel) -> str:
    if cfg.backend != "auto":
        return cfg.backend
    return "native" if mm.model.num_rows * mm.model.num_vars <= NATIVE_CELLS else "highs"


def initial_columns(inst: Instance, cfg: ColGenConfig) -> tuple[list[Route], Schedule | None]:
    if cfg.init == "simple":
        return simple_init(inst), None
    res = insertion_init(inst)
    return res.routes, res.schedule


def _support(lp, mm: MasterModel) -> list[Route]:
    by_nodes = mm.route_by_nodes()
    picked = {nodes for (nodes, _), v in mm.y.items() if lp.x[v] > 1e-9}
    return [by_nodes[n] for n in sorted(picked)]


def _route_set(inst: Instance, cfg: ColGenConfig) -> list[Route]:
    if cfg.routes is not None:
        return sorted(cfg.routes)
    return enumerate_routes(inst, max_legs=cfg.max_legs, max_routes=cfg.max_routes)


class _Generator:
    def __init__(self, inst: Instance, cfg: ColGenConfig, index: ServiceIndex):
        self.inst, self.cfg, self.index = inst, cfg, index
        self.rng = np.random.default_rng(cfg.seed)
        self.routes = _route_set(inst, cfg) if cfg.generator == "enumerated" else []
        self.calls = 0

    def __call__(self, pool: ColumnPool, duals, support: list[Route]) -> tuple[list[tuple[Route, float]], float]:
        """New candidate columns with their estimates, and the smallest estimate seen."""
        cfg, inst = self.cfg, self.inst
        self.calls += 1
        if cfg.generator == "enumerated":
            if cfg.pricing == ENUM:
                found = price_by_enumeration(self.routes, duals, cfg.max_columns, inst, self.index, exclude=pool)
                return [(c.route, c.value) for c in found], min((c.value for c in found), default=math.nan)
            if cfg.pricing == RANDOM:
                rest = [r for r in self.routes if r not in pool]
                picked = price_random_ablation(rest, self.rng, cfg.max_columns)
                return [(r, math.nan) for r in picked], math.nan
            est = Estimator(inst, duals, cfg.pricing, self.index)
            found = price_by_estimate(self.routes, est, cfg.max_columns, exclude=pool)
            return found, min((v for _, v in found), default=math.nan)
        if not support:
            return [], math.nan
        if cfg.generator == "vns":
            params = dataclasses.replace(cfg.vns or VNSParams(), max_columns=cfg.max_columns, pricing=cfg.pricing)
            out = vns_generate(support, duals, params, inst, index=self.index)
        else:
            base = cfg.ga or GAParams()
            params = dataclasses.replace(base, max_columns=cfg.max_columns, pricing=cfg.pricing,
                                         seed=int(cfg.seed) * 1_000_003 + self.calls)
            out = ga_generate(support, duals, params, inst, index=self.index)
        self.last_pool = (len(out), cfg.max_columns + len(support))
        support_nodes = {r.nodes for r in support}
        found = [(e.route, e.estimate) for e in out.entries() if e.route.nodes not in support_nodes]
        return [(r, v) for r, v in found if r not in pool], min((v for _, v in found), default=math.nan)


def _cut_loop(mm: MasterModel, inst: Instance, cfg: ColGenConfig, stats: RunStats, backend: str):
    """Solve the integer master, adding cuts until the schedule replays on time."""
    while True:
        sol = solve_mip(mm.model, cfg.mip, backend=backend)
        stats.mip_nodes += sol.nodes
        if sol.status == INFEASIBLE or not np.all(np.isfinite(sol.x)):
            if sol.status != INFEASIBLE:
                stats.status = "limit"
                stats.notes.append(f"integer solve stopped without a schedule ({sol.note})")
            return None, sol
        if sol.status != OPTIMAL:
            stats.status = "limit"
            stats.notes.append(f"integer solve stopped early ({sol.note}); bound {sol.bound:g}")
        schedule = extract_solution(sol, mm, inst)
        if math.isnan(stats.pre_cut_objective):
            stats.pre_cut_objective = schedule.objective
        if simulate_schedule(schedule, inst).clean:
            return schedule, sol
        pairs: list[IncompatiblePair] = []
        for ri in schedule.instances:
            pairs += detect_incompatibilities(ri.route, ri.flow_map, ri.shift, inst)
        fresh = [p for p in pairs if p.key not in mm.cuts]
        if not fresh:
            stats.status = "incomplete"
            stats.notes.append("schedule replays late but no new incompatible pair was found")
            return schedule, sol
        if stats.cut_rounds >= cfg.cut_rounds:
            stats.status = "incomplete"
            stats.notes.append(f"cut round limit {cfg.cut_rounds} reached")
            return schedule, sol
        add_incompatibility_cuts(mm, fresh)
        stats.cut_rounds += 1
        stats.cut_count = len(mm.cuts)
        log.info("cut round %d: %d new cuts", stats.cut_rounds, len(fresh))


def solve(inst: Instance, cfg: ColGenConfig | None = None) -> tuple[Schedule, RunStats]:
    cfg = cfg or ColGenConfig()
    started = time.perf_counter()
    stats = RunStats()
    index = ServiceIndex(inst)

    if not inst.commodities:
        stats.stop_reason = "no commodities"
        stats.iterations.append(IterationStats(1, 0.0, 0, 0, math.nan, 0.0))
        stats.objective = stats.pre_cut_objective = 0.0
        stats.solve_seconds = time.perf_counter() - started
        return Schedule([], 0.0), stats

    init_routes, _ = initial_columns(inst, cfg)
    pool = ColumnPool(init_routes)
    stats.initial_columns = len(pool)
    try:
        generate = _Generator(inst, cfg, index)
    except RouteBudgetExceeded as exc:
        raise ValueError(f"{exc}; use a heuristic generator or raise max_routes") from exc

    fleet_in_colgen = not cfg.fleet_relaxed_during_colgen
    backend = cfg.backend
    for it in range(1, cfg.max_iterations + 1):
        t0 = time.perf_counter()
        mm = build_rmp(pool, inst, relaxed=True, fleet_active=fleet_in_colgen, index=index)
        backend = _pick_backend(cfg, mm)
        lp = solve_lp(mm.model, backend=backend)
        if lp.status != OPTIMAL:
            stats.status = "infeasible"
            raise InfeasibleModelError(f"relaxed master is {lp.status} at iteration {it}", stats)
        duals = extract_duals(lp, mm)
        support = _support(lp, mm)
        found, min_est = generate(pool, duals, support)
        if cfg.record_columns:
            stats.emitted += [EmittedColumn(it, r, v, is_distance_feasible(r, 0, inst)) for r, v in found]
        added = sum(pool.add(route, estimate=value, iteration=it) for route, value in found)
        if cfg.generator in ("vns", "ga") and hasattr(generate, "last_pool"):
            stats.generator_pool_sizes.append(generate.last_pool)
        stats.columns_generated += added
        stats.iterations.append(IterationStats(it, lp.objective, added, len(pool), min_est,
                                               time.perf_counter() - t0))
        log.info("iteration %d: relaxed %.3f, %d columns added, pool %d", it, lp.objective, added, len(pool))
        if not added:
            stats.stop_reason = ("no negative column in the route set" if cfg.pricing == ENUM
                                 else "no new columns")
            break
        if time.perf_counter() - started > cfg.time_limit:
            stats.stop_reason = "time limit"
            stats.status = "limit"
            break
    else:
        stats.stop_reason = "iteration limit"
    stats.pool_size = len(pool)

    mm = build_rmp(pool, inst, relaxed=False, fleet_active=True, index=index)
    backend = _pick_backend(cfg, mm)
    stats.backend = backend
    schedule, sol = _cut_loop(mm, inst, cfg, stats, backend)

    if schedule is not None and cfg.reprice_after_cuts and mm.cuts:
        schedule = _reprice_once(pool, mm, inst, cfg, stats, generate, index) or schedule

    stats.solve_seconds = time.perf_counter() - started
    if schedule is None and stats.status == "limit":
        raise InfeasibleModelError("no integer schedule found within the solver limits", stats)
    if schedule is None:
        stats.status = "infeasible"
        trucks = inst.fleet_size
        raise InfeasibleModelError(
            f"integer master is infeasible with {trucks} trucks per shift over {len(pool)} columns "
            f"({inst.total_units} units, {inst.shifts.count} shifts)", stats)
    stats.objective = schedule.objective
    return schedule, stats


def _reprice_once(pool, mm, inst, cfg, stats, generate, index) -> Schedule | None:
    """One extra column round under the cut model's LP duals, then re-solve with the same cuts."""
    relaxed = mm.model.relaxed()
    lp = solve_lp(relaxed, backend=stats.backend)
    if lp.status != OPTIMAL:
        return None
    duals = extract_duals(lp, mm)
    found, _ = generate(pool, duals, _support(lp, mm))
    added = sum(pool.add(r, estimate=v, iteration=len(stats.iterations) + 1) for r, v in found)
    stats.columns_generated += added
    stats.pool_size = len(pool)
    if not added:
        return None
    mm2 = build_rmp(pool, inst, relaxed=False, fleet_active=True, index=index)
    add_incompatibility_cuts(mm2, mm.cut_pairs)
    schedule, _ = _cut_loop(mm2, inst, cfg, stats, stats.backend)
    return schedule


# --------------------------------------------------------------------------
# benchmark harness


@dataclass
class BenchRow:
    instance: str
    config: str
    repeat: int
    seed: int
    stats: RunStats | None
    error: str = ""

    def as_dict(self) -> dict:
        base = {"instance": self.instance, "config": self.config, "repeat": self.repeat, "seed": self.seed}
        if self.stats is None:
            return base | {"T": "", "T_solve": "", "Col": "", "Obj": "", "pre_cut": "", "iterations": "",
                           "cuts": "", "cut_rounds": "", "status": "error", "error": self.error}
        return base | self.stats.summary_row() | {"error": ""}


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = ["instance", "config", "repeat", "seed", "T", "T_solve", "Col", "Obj", "pre_cut",
                  "iterations", "cuts", "cut_rounds", "status", "error"]
        w = csv.DictWriter(buf, fieldnames=fields)
        w.writeheader()
        for row in self.rows:
            w.writerow(row.as_dict())
        return buf.getvalue()

    def means(self) -> list[dict]:
        """Per (instance, config) averages over repeats of successful runs."""
        groups: dict[tuple[str, str], list[RunStats]] = {}
        for row in self.rows:
            if row.stats is not None:
                groups.setdefault((row.instance, row.config), []).append(row.stats)
        out = []
        for (name, label), runs in groups.items():
            out.append({"instance": name, "config": label, "runs": len(runs),
                        "T": sum(r.total_seconds for r in runs) / len(runs),
                        "Col": sum(r.columns_generated for r in runs) / len(runs),
                        "Obj": sum(r.objective for r in runs) / len(runs)})
        return out

    def table(self) -> str:
        lines = [f"{'instance':<16} {'config':<24} {'runs':>4} {'T(s)':>9} {'Col.':>8} {'Obj.(km)':>10}"]
        for m in self.means():
            lines.append(f"{m['instance']:<16} {m['config']:<24} {m['runs']:>4} {m['T']:>9.2f} "
                         f"{m['Col']:>8.1f} {m['Obj']:>10.1f}")
        failed = [r for r in self.rows if r.stats is None]
        for r in failed:
            lines.append(f"{r.instance:<16} {r.config:<24} failed: {r.error}")
        return "\n".join(lines) + "\n"


def run_bench(instances: Iterable[tuple[str, Instance]], configs: Sequence[tuple[str, ColGenConfig]], *,
              repeats: int = 1, csv_path=None) -> BenchReport:
    """Solve every instance under every configuration; failures are recorded, not raised."""
    report = BenchReport()
    for name, inst in instances:
        for label, cfg in configs:
            for rep in range(repeats):
                seed = cfg.seed + rep
                run_cfg = dataclasses.replace(cfg, seed=seed)
                try:
                    _, stats = solve(inst, run_cfg)
                    report.rows.append(BenchRow(name, label, rep, seed, stats))
                except Exception as exc:  # recorded per cell so the sweep continues
                    stats = getattr(exc, "stats", None)
                    report.rows.append(BenchRow(name, label, rep, seed, None, f"{type(exc).__name__}: {exc}"))
                    if stats is not None:
                        report.rows[-1].error += f" [{stats.status}]"
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv())
    return report
