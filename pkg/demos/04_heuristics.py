"""Initial columns and the two route generators."""

import warnings

from ftlcg.heuristics import GAParams, VNSParams, ga_generate, insertion_init, simple_init, vns_generate
from ftlcg.instance import GeneratorConfig, generate_instance
from ftlcg.lp import solve_lp
from ftlcg.master import build_rmp, extract_duals, format_schedule

warnings.simplefilter("ignore")
inst = generate_instance(GeneratorConfig(node_count=6, shift_count=2, commodity_count=(8, 10), units=(25, 35),
                                         fit_fleet=True, seed=5))

dedicated = simple_init(inst)
greedy = insertion_init(inst)
print(f"{len(dedicated)} dedicated routes; greedy schedule {greedy.schedule.objective:g} km "
      f"over {len(greedy.routes)} routes")
print(format_schedule(greedy.schedule).splitlines()[-1])

mm = build_rmp(greedy.routes, inst, fleet_active=False)
duals = extract_duals(solve_lp(mm.model), mm)

trace = []
vns = vns_generate(greedy.routes, duals, VNSParams(max_columns=20), inst, trace=trace)
print(f"VNS: {len(vns) - len(greedy.routes)} new routes after {len(trace) - 1} improvements")
for e in sorted(vns.entries(), key=lambda e: e.estimate)[:3]:
    print(f"  {e.route}  {e.estimate:+.1f}")

trace = []
ga = ga_generate(greedy.routes, duals, GAParams(population_size=40, generations=30, max_columns=20, seed=1), inst,
                 trace=trace)
print(f"GA: {len(ga) - len(greedy.routes)} new routes, best fitness per generation "
      f"{trace[0]['best_fitness']:+.1f} -> {trace[-1]['best_fitness']:+.1f}")
