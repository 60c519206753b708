from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

LE, GE, EQ = "<=", ">=", "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

TOL = 1e-9


@dataclass
class Variable:
    name: str
    lb: float = 0.0
    ub: float = math.inf
    obj: float = 0.0
    integer: bool = False


@dataclass
class Constraint:
    name: str
    index: tuple[int, ...]
    coef: tuple[float, ...]
    sense: str
    rhs: float


class LinearModel:
    """Minimisation model: variables with bounds and constraints ``a.x (<=|>=|=) b``."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_rows(self) -> int:
        return len(self.constraints)

    def add_variable(self, name: str, lb: float = 0.0, ub: float = math.inf, obj: float = 0.0,
                     integer: bool = False) -> int:
        if not math.isfinite(obj) or math.isnan(lb) or math.isnan(ub) or lb > ub:
            raise ValueError(f"variable {name!r}: bad bounds or objective")
        self.variables.append(Variable(name, float(lb), float(ub), float(obj), integer))
        return len(self.variables) - 1

    def add_constraint(self, name: str, terms: Mapping[int, float] | Iterable[tuple[int, float]],
                       sense: str, rhs: float) -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"constraint {name!r}: unknown sense {sense!r}")
        merged: dict[int, float] = {}
        for j, a in (terms.items() if isinstance(terms, Mapping) else terms):
            if not 0 <= j < len(self.variables):
                raise ValueError(f"constraint {name!r} references undeclared variable {j}")
            merged[j] = merged.get(j, 0.0) + float(a)
        if not all(math.isfinite(a) for a in merged.values()) or not math.isfinite(rhs):
            raise ValueError(f"constraint {name!r}: non-finite coefficient")
        idx = tuple(sorted(j for j, a in merged.items() if a != 0.0))
        self.constraints.append(Constraint(name, idx, tuple(merged[j] for j in idx), sense, float(rhs)))
        return len(self.constraints) - 1

    def copy(self) -> "LinearModel":
        out = LinearModel(self.name)
        out.variables = [Variable(v.name, v.lb, v.ub, v.obj, v.integer) for v in self.variables]
        out.constraints = list(self.constraints)
        return out

    def relaxed(self) -> "LinearModel":
        out = self.copy()
        for v in out.variables:
            v.integer = False
        return out

    # array views -----------------------------------------------------------

    def objective(self) -> np.ndarray:
        return np.array([v.obj for v in self.variables], dtype=float)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([v.lb for v in self.variables], dtype=float),
                np.array([v.ub for v in self.variables], dtype=float))

    def integrality(self) -> np.ndarray:
        return np.array([v.integer for v in self.variables], dtype=bool)

    def matrix(self) -> sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for i, con in enumerate(self.constraints):
            rows.extend([i] * len(con.index))
            cols.extend(con.index)
            vals.extend(con.coef)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(self.num_rows, self.num_vars), dtype=float)

    def senses(self) -> list[str]:
        return [c.sense for c in self.constraints]

    def rhs(self) -> np.ndarray:
        return np.array([c.rhs for c in self.constraints], dtype=float)

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        return self.matrix() @ np.asarray(x, dtype=float)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest bound or row violation of ``x``."""
        x = np.asarray(x, dtype=float)
        lb, ub = self.bounds()
        worst = float(max(np.max(lb - x, initial=0.0), np.max(x - ub, initial=0.0)))
        act = self.row_activity(x)
        for a, con in zip(act, self.constraints):
            if con.sense == LE:
                worst = max(worst, a - con.rhs)
            elif con.sense == GE:
                worst = max(worst, con.rhs - a)
            else:
                worst = max(worst, abs(a - con.rhs))
        return worst


@dataclass
class LPSolution:
    status: str
    x: np.ndarray
    duals: np.ndarray
    objective: float
    bound: float = math.nan
    iterations: int = 0
    nodes: int = 0
    backend: str = "native"
    note: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def reduced_costs(self, model: LinearModel) -> np.ndarray:
        return model.objective() - model.matrix().T @ self.duals
