"""Generate a random instance, validate it, and round-trip it through the text format."""

import tempfile
from pathlib import Path

from ftlcg.instance import (GeneratorConfig, emergency_share, generate_instance, read_instance, validate_instance,
                            write_instance)

cfg = GeneratorConfig(node_count=7, shift_count=4, seed=11)
inst = generate_instance(cfg)
print(f"{len(inst.commodities)} commodities, {inst.total_units} truckload units, fleet {inst.fleet_size}")
print(f"emergency share {emergency_share(inst, cfg.emergency_window):.0%}")
print("validation problems:", validate_instance(inst) or "none")

fitted = generate_instance(GeneratorConfig(node_count=7, shift_count=4, seed=11, fit_fleet=True))
print(f"fleet grown until a greedy schedule fits: {fitted.fleet_size}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "inst.txt"
    write_instance(inst, path)
    print("round trip identical:", read_instance(path) == inst)
    print("\n".join(path.read_text().splitlines()[:8]))
