"""Column generation for multi-shift full-truckload scheduling with time windows.

Modules: ``instance`` (data, files, generator), ``routing`` (routes, timing,
push-back, replay), ``lp`` (LP/MIP engine), ``master`` (restricted master
problem and cuts), ``pricing`` (reduced costs), ``heuristics`` (initial
columns, VNS and GA generators) and ``driver`` (pipeline and benchmarks).
"""

from .driver import ColGenConfig, InfeasibleModelError, RunStats, run_bench, solve
from .instance import Commodity, GeneratorConfig, Instance, Network, ShiftCalendar, generate_instance, worked_example
from .master import Schedule
from .routing import Route

__version__ = "0.1.0"

__all__ = [
    "ColGenConfig", "Commodity", "GeneratorConfig", "InfeasibleModelError", "Instance", "Network", "Route",
    "RunStats", "Schedule", "ShiftCalendar", "generate_instance", "worked_example", "run_bench", "solve",
]
