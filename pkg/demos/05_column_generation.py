"""The full pipeline under different generators and pricing modes."""

import warnings

from ftlcg import ColGenConfig, GeneratorConfig, generate_instance, solve
from ftlcg.heuristics import GAParams
from ftlcg.routing import simulate_schedule

warnings.simplefilter("ignore")
inst = generate_instance(GeneratorConfig(node_count=5, shift_count=2, commodity_count=(8, 10), units=(20, 30),
                                         fit_fleet=True, seed=3))

configs = [
    ColGenConfig(pricing="p2", max_columns=25),
    ColGenConfig(pricing="enum", max_columns=25),
    ColGenConfig(pricing="random", max_columns=25),
    ColGenConfig(generator="vns", init="insertion", max_columns=25),
    ColGenConfig(generator="ga", init="insertion", max_columns=25, ga=GAParams(population_size=40, generations=30)),
]
for cfg in configs:
    schedule, stats = solve(inst, cfg)
    print(f"{cfg.label():<24} {stats.objective:>7g} km  pre-cut {stats.pre_cut_objective:g}  "
          f"{stats.columns_generated:>3} columns  {len(stats.iterations)} iterations  "
          f"{stats.cut_count} cuts  on time: {simulate_schedule(schedule, inst).clean}  ({stats.stop_reason})")
