"""Command line entry point: ``ftlcg generate|solve|enumerate|check|bench``.

Exit codes: 0 success, 1 usage or input error (``check``: schedule not
clean), 2 infeasible, 3 incomplete or stopped by a limit.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
import time
import warnings
from pathlib import Path

from .driver import BACKEND_CHOICES, GENERATORS, INITS, ColGenConfig, InfeasibleModelError, run_bench, solve
from .heuristics import GAParams, VNSParams
from .instance import GeneratorConfig, ParseError, generate_instance, read_instance, serialize_instance, validate_instance
from .lp import MIPConfig
from .master import format_schedule, parse_schedule
from .pricing import PRICING_MODES
from .routing import RouteBudgetExceeded, enumerate_routes, read_route_cache, simulate_schedule, write_route_cache

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_INCOMPLETE = 0, 1, 2, 3


def _pair(kind):
    def parse(text: str):
        lo, _, hi = text.partition(",")
        return kind(lo), kind(hi or lo)
    return parse


def _add_generate(sub) -> None:
    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--nodes", type=int, default=7)
    p.add_argument("--shifts", type=int, default=4)
    p.add_argument("--commodities", type=_pair(int), metavar="LO,HI", help="commodity count range")
    p.add_argument("--units", type=_pair(int), metavar="LO,HI", help="total truckload units range")
    p.add_argument("--fraction-at-start", type=float, default=0.30)
    p.add_argument("--emergency", type=_pair(float), default=(0.10, 0.30), metavar="LO,HI")
    p.add_argument("--min-window", type=int, default=60)
    p.add_argument("--distance", type=_pair(int), default=(10, 60), metavar="LO,HI", help="km")
    p.add_argument("--speed", type=float, default=0.5, help="km per minute")
    p.add_argument("--service-time", type=int, default=30)
    p.add_argument("--shift-start", type=int, default=0)
    p.add_argument("--shift-duration", type=int, default=720)
    p.add_argument("--fleet", type=int)
    p.add_argument("--fit-fleet", action="store_true", help="grow the fleet until a greedy schedule fits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", type=Path, help="instance file (default: stdout)")


def _add_solve(sub) -> None:
    p = sub.add_parser("solve", help="column generation followed by the integer master and cut repair")
    p.add_argument("instance", type=Path)
    p.add_argument("--pricing", choices=PRICING_MODES, default="p2")
    p.add_argument("--generator", choices=GENERATORS, default="enumerated")
    p.add_argument("--init", choices=INITS, default="simple")
    p.add_argument("--max-columns", type=int, default=1000)
    p.add_argument("--max-iterations", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="schedule file")
    p.add_argument("--stats", type=Path, help="per-iteration CSV")
    p.add_argument("--routes", type=Path, help="route cache to use instead of enumerating")
    p.add_argument("--backend", choices=BACKEND_CHOICES, default="auto")
    p.add_argument("--time-limit", type=float, default=3600.0, help="seconds for column generation")
    p.add_argument("--mip-time-limit", type=float, default=300.0)
    p.add_argument("--cut-rounds", type=int, default=20)
    p.add_argument("--max-legs", type=int, default=12)
    p.add_argument("--population", type=int, default=500, help="GA population size")
    p.add_argument("--generations", type=int, default=500, help="GA generations")
    p.add_argument("--fleet-in-colgen", action="store_true", help="keep fleet rows during column generation")


def _add_enumerate(sub) -> None:
    p = sub.add_parser("enumerate", help="write every distance-wise feasible route")
    p.add_argument("instance", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.add_argument("--max-legs", type=int, default=12)
    p.add_argument("--max-routes", type=int, default=500_000)


def _add_check(sub) -> None:
    p = sub.add_parser("check", help="replay a schedule file; exit 0 only when on time")
    p.add_argument("instance", type=Path)
    p.add_argument("schedule", type=Path)


def _add_bench(sub) -> None:
    p = sub.add_parser("bench", help="run a configuration matrix (JSON) and report")
    p.add_argument("matrix", type=Path)
    p.add_argument("--csv", type=Path)
    p.add_argument("--repeats", type=int, help="override the matrix repeat count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftlcg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_generate, _add_solve, _add_enumerate, _add_check, _add_bench):
        add(sub)
    return parser


def _load(path: Path):
    started = time.perf_counter()
    inst = read_instance(path)
    problems = validate_instance(inst)
    if problems:
        raise ParseError("; ".join(f"{v.code}: {v.message}" for v in problems))
    return inst, time.perf_counter() - started


def cmd_generate(args) -> int:
    cfg = GeneratorConfig(
        node_count=args.nodes, shift_count=args.shifts, commodity_count=args.commodities, units=args.units,
        fraction_available_at_start=args.fraction_at_start, emergency_fraction=args.emergency,
        min_window=args.min_window, distance_km=args.distance, speed_km_per_min=args.speed,
        service_time=args.service_time, shift_start=args.shift_start, shift_duration=args.shift_duration,
        fleet_size=args.fleet, fit_fleet=args.fit_fleet, seed=args.seed)
    text = serialize_instance(generate_instance(cfg))
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def config_from_args(args) -> ColGenConfig:
    routes = tuple(read_route_cache(args.routes)) if args.routes else None
    return ColGenConfig(
        pricing=args.pricing, generator=args.generator, init=args.init, max_columns=args.max_columns,
        max_iterations=args.max_iterations, seed=args.seed, backend=args.backend, time_limit=args.time_limit,
        cut_rounds=args.cut_rounds, max_legs=args.max_legs, routes=routes,
        fleet_relaxed_during_colgen=not args.fleet_in_colgen,
        mip=MIPConfig(time_limit=args.mip_time_limit),
        ga=GAParams(population_size=args.population, generations=args.generations, seed=args.seed))


def _write_stats(path: Path, stats) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "relaxed_objective", "columns_added", "pool_size", "min_estimate", "seconds"])
        for it in stats.iterations:
            w.writerow([it.iteration, it.relaxed_objective, it.columns_added, it.pool_size, it.min_estimate,
                        round(it.seconds, 4)])


def cmd_solve(args) -> int:
    inst, parse_seconds = _load(args.instance)
    cfg = config_from_args(args)
    try:
        schedule, stats = solve(inst, cfg)
    except InfeasibleModelError as exc:
        if exc.stats.status == "limit":
            print(f"incomplete: {exc}", file=sys.stderr)
            return EXIT_INCOMPLETE
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    stats.parse_seconds = parse_seconds
    text = format_schedule(schedule)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.stats:
        _write_stats(args.stats, stats)
    row = stats.summary_row()
    print(f"objective {row['Obj']:g} km, {row['Col']} columns, {row['iterations']} iterations, "
          f"{row['cuts']} cuts, {row['T']:.2f} s ({stats.solve_seconds:.2f} s excluding parsing), "
          f"status {stats.status}", file=sys.stderr)
    for note in stats.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK if stats.status == "optimal" else EXIT_INCOMPLETE


def cmd_enumerate(args) -> int:
    inst, _ = _load(args.instance)
    try:
        routes = enumerate_routes(inst, max_legs=args.max_legs, max_routes=args.max_routes)
    except RouteBudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INCOMPLETE
    write_route_cache(routes, args.out)
    print(f"{len(routes)} routes written to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    inst, _ = _load(args.instance)
    schedule = parse_schedule(args.schedule.read_text(encoding="utf-8"), inst)
    report = simulate_schedule(schedule, inst)
    for v in report.violations:
        print(f"{v.kind}: shift {v.shift} route {','.join(map(str, v.route))} truck {v.truck} "
              f"index {v.index} {v.commodity} {v.detail}".rstrip())
    delivered = schedule.delivered()
    missing = [k.id for k in inst.commodities if delivered.get(k.id, 0) != k.quantity]
    for cid in missing:
        print(f"coverage: {cid} has {delivered.get(cid, 0)} of {inst.commodity(cid).quantity} units")
    clean = report.clean and not missing
    print(f"{'clean' if clean else 'violations found'}: {len(report.deliveries)} deliveries, "
          f"{len(report.violations)} violations")
    return EXIT_OK if clean else EXIT_ERROR


_CONFIG_KEYS = {f.name for f in dataclasses.fields(ColGenConfig)} - {"mip", "vns", "ga", "routes"}


def load_matrix(path: Path):
    matrix = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent
    instances = []
    for entry in matrix.get("instances", []):
        if "path" in entry:
            inst = read_instance(base / entry["path"])
            name = entry.get("name", Path(entry["path"]).stem)
        else:
            gen = dict(entry.get("generate", {}))
            for key in ("commodity_count", "units", "emergency_fraction", "distance_km"):
                if key in gen:
                    gen[key] = tuple(gen[key])
            inst = generate_instance(GeneratorConfig(**gen))
            name = entry.get("name", f"gen-{gen.get('seed', 0)}")
        instances.append((name, inst))
    configs = []
    for entry in matrix.get("configs", []):
        entry = dict(entry)
        label = entry.pop("label", None)
        unknown = set(entry) - _CONFIG_KEYS - {"mip_time_limit", "population", "generations"}
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        mip = MIPConfig(time_limit=entry.pop("mip_time_limit", 300.0))
        ga = GAParams(population_size=entry.pop("population", 500), generations=entry.pop("generations", 500))
        cfg = ColGenConfig(mip=mip, ga=ga, vns=VNSParams(), **entry)
        configs.append((label or cfg.label(), cfg))
    return instances, configs, int(matrix.get("repeats", 1))


def cmd_bench(args) -> int:
    instances, configs, repeats = load_matrix(args.matrix)
    report = run_bench(instances, configs, repeats=args.repeats or repeats, csv_path=args.csv)
    sys.stdout.write(report.table())
    return EXIT_OK if all(r.stats is not None for r in report.rows) else EXIT_INCOMPLETE


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "enumerate": cmd_enumerate, "check": cmd_check,
            "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
