from .common import routes_of, write_trace
from .ga import GAParams, ga_generate
from .init import FleetWarning, InsertionResult, insertion_init, simple_init
from .vns import NEIGHBOURHOODS, VNSParams, vns_generate

__all__ = [
    "FleetWarning", "GAParams", "InsertionResult", "NEIGHBOURHOODS", "VNSParams", "ga_generate",
    "insertion_init", "routes_of", "simple_init", "vns_generate", "write_trace",
]
