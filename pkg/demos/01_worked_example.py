"""Four commodities, four routes: timing, push-back, and how pair cuts repair a late schedule."""

from ftlcg.instance import WORKED_EXAMPLE_ROUTES, clock, worked_example
from ftlcg.lp import solve_mip
from ftlcg.master import add_incompatibility_cuts, build_rmp, extract_solution, format_schedule
from ftlcg.routing import Route, compute_time_windows, detect_incompatibilities, propagate_push_back, simulate_schedule

inst = worked_example()
routes = [Route.from_nodes(r, inst.network) for r in WORKED_EXAMPLE_ROUTES]

for r in routes:
    t = compute_time_windows(r, 0, inst)
    print(f"route {r} ({r.distance} km)")
    print("  earliest", " ".join(clock(v) for v in t.e))
    print("  latest  ", " ".join(clock(v) for v in t.l))

mm = build_rmp(routes, inst, relaxed=False)
first = extract_solution(solve_mip(mm.model), mm, inst)
print("\ninteger optimum ignoring waits:\n" + format_schedule(first))

ri = first.instances[0]
timing = compute_time_windows(ri.route, 0, inst)
pushed = propagate_push_back(ri.route, timing, ri.flow_map, 0, inst)
print("after waiting for late loads:", " ".join(clock(v) for v in pushed))
for v in simulate_schedule(first, inst).violations:
    print("  late:", v.commodity, v.detail)

pairs = detect_incompatibilities(ri.route, ri.flow_map, 0, inst)
for p in pairs:
    print(f"  conflict: {p.k} waits {p.k_push_back} min, {p.v} tolerates {p.v_acceptable_push_back}")
add_incompatibility_cuts(mm, pairs)
repaired = extract_solution(solve_mip(mm.model), mm, inst)
print("\nwith the conflicts forbidden:\n" + format_schedule(repaired))
print("replays on time:", simulate_schedule(repaired, inst).clean)
