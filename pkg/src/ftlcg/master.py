"""Restricted master problem over a column pool.

Variables are route multiplicities ``y[r, s]`` (cost = route distance) and
unit flows ``x[r, i, k, s]`` that exist only where commodity ``k`` can be
loaded at index ``i`` of ``r`` in shift ``s``. Rows:

* fleet      sum_r y[r, s] <= n                       (per shift, optional)
* demand     sum x[., ., k, .] = Q(k)                 (per commodity)
* capacity   sum_k x[r, i, k, s] - y[r, s] <= 0       (per loading index)
* link       x[r, i, k, s] - delta * y[r, s] <= 0     (debug mode only)

Incompatibility cuts add a binary ``theta`` and two big-M rows per pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .instance import Instance
from .lp import GE, LE, EQ, LinearModel, LPSolution
from .routing import IncompatiblePair, Route, RouteInstance, ServiceIndex, service_feasible

INTEGRALITY_TOL = 1e-6


class UncoverableCommodityError(ValueError):
    def __init__(self, commodities: Sequence[str]):
        self.commodities = list(commodities)
        super().__init__(f"no pool route can serve commodities: {', '.join(self.commodities)}")


# --------------------------------------------------------------------------
# column pool


@dataclass
class PoolEntry:
    route: Route
    estimate: float = math.nan
    iteration: int = 0


class ColumnPool:
    """Insertion-ordered set of distinct routes with admission bookkeeping."""

    def __init__(self, routes: Iterable[Route] = (), capacity: int | None = None):
        self.capacity = capacity
        self._entries: dict[tuple[int, ...], PoolEntry] = {}
        for r in routes:
            self.add(r)

    def add(self, route: Route, estimate: float = math.nan, iteration: int = 0) -> bool:
        if route.nodes in self._entries:
            return False
        if self.capacity is not None and len(self._entries) >= self.capacity:
            return False
        self._entries[route.nodes] = PoolEntry(route, estimate, iteration)
        return True

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, route: Route) -> bool:
        return route.nodes in self._entries

    def __iter__(self) -> Iterator[Route]:
        return (e.route for e in self._entries.values())

    @property
    def routes(self) -> list[Route]:
        return list(self)

    def entries(self) -> list[PoolEntry]:
        return list(self._entries.values())

    def entry(self, route: Route) -> PoolEntry:
        return self._entries[route.nodes]


# --------------------------------------------------------------------------
# duals


@dataclass
class DualValues:
    """Master prices as magnitudes in the reduced-cost formula.

    ``alpha`` (fleet), ``beta`` (capacity) and ``gamma`` (link) are reported
    as the non-negative negatives of the LP duals of their ``<=`` rows, so a
    route column prices as ``d_r + alpha - sum beta - ...``. ``pi`` is the
    demand-row dual itself: larger means a more valuable commodity.
    """

    alpha: dict[int, float] = field(default_factory=dict)
    pi: dict[str, float] = field(default_factory=dict)
    beta: dict[tuple[tuple[int, ...], int, int], float] = field(default_factory=dict)
    gamma: dict[tuple[tuple[int, ...], int, str, int], float] = field(default_factory=dict)

    def a(self, s: int) -> float:
        return self.alpha.get(s, 0.0)

    def p(self, cid: str) -> float:
        return self.pi.get(cid, 0.0)

    def b(self, route: Route, i: int, s: int) -> float:
        return self.beta.get((route.nodes, i, s), 0.0)

    def g(self, route: Route, i: int, cid: str, s: int) -> float:
        return self.gamma.get((route.nodes, i, cid, s), 0.0)

    @classmethod
    def from_pi(cls, pi: dict[str, float]) -> "DualValues":
        return cls(pi=dict(pi))


# --------------------------------------------------------------------------
# model


@dataclass
class MasterModel:
    model: LinearModel
    inst: Instance
    routes: list[Route]
    relaxed: bool
    fleet_active: bool
    big_m: int
    y: dict[tuple[tuple[int, ...], int], int] = field(default_factory=dict)
    x: dict[tuple[tuple[int, ...], int, str, int], int] = field(default_factory=dict)
    fleet_rows: dict[int, int] = field(default_factory=dict)
    demand_rows: dict[str, int] = field(default_factory=dict)
    cap_rows: dict[tuple[tuple[int, ...], int, int], int] = field(default_factory=dict)
    link_rows: dict[tuple[tuple[int, ...], int, str, int], int] = field(default_factory=dict)
    cuts: dict[tuple, int] = field(default_factory=dict)
    cut_pairs: list[IncompatiblePair] = field(default_factory=list)

    def route_by_nodes(self) -> dict[tuple[int, ...], Route]:
        return {r.nodes: r for r in self.routes}


def build_rmp(pool: Iterable[Route], inst: Instance, *, relaxed: bool = True, fleet_active: bool = True,
              materialize_links: bool = False, index: ServiceIndex | None = None) -> MasterModel:
    routes = list(pool)
    index = index or ServiceIndex(inst)
    model = LinearModel("rmp")
    integer = not relaxed
    mm = MasterModel(model, inst, routes, relaxed, fleet_active, big_m=inst.max_quantity)
    cal = inst.shifts
    flows_by_k: dict[str, list[int]] = {k.id: [] for k in inst.commodities}
    covered: set[str] = set()

    for r in routes:
        table = index.table(r)
        for s in range(cal.count):
            feasible = {j: [k for k, shifts in entries if s in shifts] for j, entries in table.items()}
            if not materialize_links and not any(feasible.values()):
                continue
            yv = model.add_variable(f"y[{r}|{s}]", obj=r.distance, integer=integer)
            mm.y[r.nodes, s] = yv
            for j in r.positions:
                ok = {k.id for k in feasible.get(j, ())}
                ks = inst.commodities if materialize_links else feasible.get(j, ())
                terms = []
                for k in ks:
                    if materialize_links and (k.origin, k.destination) != (r.nodes[j], r.nodes[j + 1]):
                        continue
                    xv = model.add_variable(f"x[{r}|{j}|{k.id}|{s}]", integer=integer)
                    mm.x[r.nodes, j, k.id, s] = xv
                    flows_by_k[k.id].append(xv)
                    terms.append((xv, 1.0))
                    if k.id in ok:
                        covered.add(k.id)
                    if materialize_links:
                        delta = 1.0 if k.id in ok else 0.0
                        mm.link_rows[r.nodes, j, k.id, s] = model.add_constraint(
                            f"link[{r}|{j}|{k.id}|{s}]", [(xv, 1.0), (yv, -delta)], LE, 0.0)
                if terms:
                    mm.cap_rows[r.nodes, j, s] = model.add_constraint(
                        f"cap[{r}|{j}|{s}]", terms + [(yv, -1.0)], LE, 0.0)

    missing = [k.id for k in inst.commodities if k.id not in covered]
    if missing:
        raise UncoverableCommodityError(missing)
    for k in inst.commodities:
        mm.demand_rows[k.id] = model.add_constraint(
            f"demand[{k.id}]", [(v, 1.0) for v in flows_by_k[k.id]], EQ, float(k.quantity))
    if fleet_active:
        for s in range(cal.count):
            ys = [(v, 1.0) for (nodes, ss), v in mm.y.items() if ss == s]
            mm.fleet_rows[s] = model.add_constraint(f"fleet[{s}]", ys, LE, float(inst.fleet_size))
    return mm


def extract_duals(lp: LPSolution, mm: MasterModel) -> DualValues:
    if not lp.optimal:
        raise ValueError(f"duals need an optimal LP solution, got status {lp.status!r}")
    y = lp.duals
    return DualValues(
        alpha={s: -float(y[row]) for s, row in mm.fleet_rows.items()},
        pi={k: float(y[row]) for k, row in mm.demand_rows.items()},
        beta={key: -float(y[row]) for key, row in mm.cap_rows.items()},
        gamma={key: -float(y[row]) for key, row in mm.link_rows.items()},
    )


def add_incompatibility_cuts(mm: MasterModel, pairs: Iterable[IncompatiblePair]) -> MasterModel:
    """Forbid each pair from sharing its route in its shift (in place; returns ``mm``)."""
    model = mm.model
    big_m = float(mm.big_m)
    for pair in pairs:
        if pair.key in mm.cuts:
            continue
        xk = mm.x[pair.route.nodes, pair.i, pair.k, pair.shift]
        xv = mm.x[pair.route.nodes, pair.j, pair.v, pair.shift]
        tag = f"{pair.route}|{pair.shift}|{pair.i}:{pair.k}|{pair.j}:{pair.v}"
        theta = model.add_variable(f"theta[{tag}]", 0.0, 1.0, integer=True)
        model.add_constraint(f"cutk[{tag}]", [(xk, 1.0), (theta, -big_m)], LE, 0.0)
        model.add_constraint(f"cutv[{tag}]", [(xv, 1.0), (theta, big_m)], LE, big_m)
        mm.cuts[pair.key] = theta
        mm.cut_pairs.append(pair)
    return mm


# --------------------------------------------------------------------------
# schedules


@dataclass
class Schedule:
    instances: list[RouteInstance] = field(default_factory=list)
    objective: float = 0.0
    cuts: list[IncompatiblePair] = field(default_factory=list)

    @property
    def routes(self) -> list[Route]:
        seen: dict[tuple[int, ...], Route] = {}
        for ri in self.instances:
            seen.setdefault(ri.route.nodes, ri.route)
        return list(seen.values())

    def trucks_in_shift(self, s: int) -> int:
        return sum(ri.count for ri in self.instances if ri.shift == s)

    def delivered(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for ri in self.instances:
            for (_, cid), units in ri.flows:
                out[cid] = out.get(cid, 0) + units
        return out


def extract_solution(mip: LPSolution, mm: MasterModel, inst: Instance) -> Schedule:
    x = np.asarray(mip.x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("solution has no values")
    int_vars = [v for v in list(mm.y.values()) + list(mm.x.values())]
    frac = np.abs(x[int_vars] - np.round(x[int_vars])) if int_vars else np.zeros(0)
    if frac.size and frac.max() > INTEGRALITY_TOL:
        raise ValueError("fractional solution; solve the integer model first")
    routes = mm.route_by_nodes()
    flows: dict[tuple[tuple[int, ...], int], list[tuple[tuple[int, str], int]]] = {}
    for (nodes, i, cid, s), v in mm.x.items():
        units = int(round(x[v]))
        if units:
            flows.setdefault((nodes, s), []).append(((i, cid), units))
    instances = []
    for (nodes, s), v in sorted(mm.y.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        count = int(round(x[v]))
        if count:
            instances.append(RouteInstance(routes[nodes], s, count, tuple(sorted(flows.get((nodes, s), [])))))
    objective = float(sum(ri.route.distance * ri.count for ri in instances))
    return Schedule(instances, objective, list(mm.cut_pairs))


def check_schedule(schedule: Schedule, inst: Instance, *, fleet_active: bool = True) -> list[str]:
    """Model-level invariants: demand met, per-index capacity, fleet size, loading indicator."""
    problems = []
    got = schedule.delivered()
    for k in inst.commodities:
        if got.get(k.id, 0) != k.quantity:
            problems.append(f"commodity {k.id}: {got.get(k.id, 0)} of {k.quantity} units routed")
    for ri in schedule.instances:
        per_idx: dict[int, int] = {}
        for (i, cid), units in ri.flows:
            per_idx[i] = per_idx.get(i, 0) + units
            if units < 0 or not service_feasible(ri.route, i, inst.commodity(cid), ri.shift, inst):
                problems.append(f"{ri.route} shift {ri.shift}: {cid} cannot load at index {i}")
        for i, units in per_idx.items():
            if units > ri.count:
                problems.append(f"{ri.route} shift {ri.shift}: {units} units at index {i} on {ri.count} trucks")
    if fleet_active:
        for s in range(inst.shifts.count):
            if schedule.trucks_in_shift(s) > inst.fleet_size:
                problems.append(f"shift {s}: {schedule.trucks_in_shift(s)} trucks exceed fleet {inst.fleet_size}")
    objective = sum(ri.route.distance * ri.count for ri in schedule.instances)
    if abs(objective - schedule.objective) > 1e-6:
        problems.append(f"objective {schedule.objective} differs from route total {objective}")
    return problems


def format_schedule(schedule: Schedule) -> str:
    lines = []
    shifts = sorted({ri.shift for ri in schedule.instances})
    for s in shifts:
        lines.append(f"shift={s}")
        for ri in schedule.instances:
            if ri.shift != s:
                continue
            lines.append(f"route={ri.route} count={ri.count}")
            for (i, cid), units in ri.flows:
                lines.append(f"flow idx={i} commodity={cid} units={units}")
    obj = schedule.objective
    lines.append(f"summary objective={int(obj) if obj == int(obj) else obj} cuts={len(schedule.cuts)}")
    return "\n".join(lines) + "\n"


def parse_schedule(text: str, inst: Instance) -> Schedule:
    instances: list[RouteInstance] = []
    shift: int | None = None
    pending: tuple[Route, int] | None = None
    flows: list[tuple[tuple[int, str], int]] = []
    objective = None

    def close() -> None:
        nonlocal pending, flows
        if pending is not None:
            instances.append(RouteInstance(pending[0], shift, pending[1], tuple(sorted(flows))))
        pending, flows = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = dict(tok.split("=", 1) for tok in line.split()[1:] if "=" in tok)
        head = line.split()[0]
        try:
            if head.startswith("shift="):
                close()
                shift = int(head.split("=", 1)[1])
            elif head.startswith("route="):
                close()
                if shift is None:
                    raise ValueError("route before any shift line")
                nodes = [int(v) for v in head.split("=", 1)[1].split(",")]
                pending = (Route.from_nodes(nodes, inst.network), int(fields["count"]))
            elif head == "flow":
                if pending is None:
                    raise ValueError("flow before any route line")
                flows.append(((int(fields["idx"]), fields["commodity"]), int(fields["units"])))
            elif head == "summary":
                close()
                objective = float(fields["objective"])
            else:
                raise ValueError(f"unrecognised line {line!r}")
        except (KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    close()
    total = float(sum(ri.route.distance * ri.count for ri in instances))
    return Schedule(instances, total if objective is None else objective)
