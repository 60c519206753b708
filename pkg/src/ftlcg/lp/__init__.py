"""Linear and integer programming engine.

Two interchangeable backends share the LinearModel / LPSolution contract:
``"native"`` (dense two-phase simplex plus branch and bound, no external
solver) and ``"highs"`` (scipy's HiGHS bindings, for models too large for a
dense tableau).
"""

from __future__ import annotations

from .mip import MIPConfig, branch_and_bound
from .model import (EQ, GE, INFEASIBLE, ITERATION_LIMIT, LE, OPTIMAL, UNBOUNDED, Constraint, LinearModel,
                    LPSolution, Variable)
from .mps import model_to_mps, write_mps
from .simplex import solve_arrays, solve_lp_native

BACKENDS = ("native", "highs")


def solve_lp(model: LinearModel, backend: str = "native") -> LPSolution:
    """Solve the LP relaxation (integrality flags ignored)."""
    if backend == "native":
        return solve_lp_native(model)
    if backend == "highs":
        from .highs import solve_lp_highs
        return solve_lp_highs(model)
    raise ValueError(f"unknown LP backend {backend!r}; choose from {BACKENDS}")


def solve_mip(model: LinearModel, config: MIPConfig | None = None, backend: str = "native") -> LPSolution:
    if backend == "native":
        return branch_and_bound(model, config)
    if backend == "highs":
        from .highs import solve_mip_highs
        return solve_mip_highs(model, config)
    raise ValueError(f"unknown LP backend {backend!r}; choose from {BACKENDS}")


__all__ = [
    "EQ", "GE", "LE", "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "ITERATION_LIMIT", "BACKENDS",
    "Constraint", "LinearModel", "LPSolution", "MIPConfig", "Variable",
    "branch_and_bound", "model_to_mps", "solve_arrays", "solve_lp", "solve_lp_native", "solve_mip",
    "write_mps",
]
