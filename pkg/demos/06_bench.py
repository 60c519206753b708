"""Benchmark matrix: several instances, several configurations, repeated seeds, CSV output."""

import tempfile
import warnings
from pathlib import Path

from ftlcg import ColGenConfig, GeneratorConfig, generate_instance, run_bench

warnings.simplefilter("ignore")
instances = [(f"n5-s{seed}", generate_instance(GeneratorConfig(node_count=5, shift_count=2, commodity_count=(6, 8),
                                                                  units=(15, 25), fit_fleet=True, seed=seed)))
             for seed in range(3)]
configs = [("p2", ColGenConfig(pricing="p2", max_columns=5)),
           ("random", ColGenConfig(pricing="random", max_columns=5))]

with tempfile.TemporaryDirectory() as tmp:
    csv_path = Path(tmp) / "bench.csv"
    report = run_bench(instances, configs, repeats=3, csv_path=csv_path)
    print(report.table())
    print(csv_path.read_text().splitlines()[0])
