"""Same contract as the native engine, delegated to HiGHS through scipy."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .mip import MIPConfig
from .model import EQ, GE, INFEASIBLE, ITERATION_LIMIT, LE, OPTIMAL, UNBOUNDED, LinearModel, LPSolution

_LP_STATUS = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}


def solve_lp_highs(model: LinearModel) -> LPSolution:
    c = model.objective()
    A = model.matrix()
    senses = np.array(model.senses())
    b = model.rhs()
    le, ge, eq = senses == LE, senses == GE, senses == EQ
    ub_rows = np.flatnonzero(le | ge)
    flip = np.where(ge[ub_rows], -1.0, 1.0)
    A_ub = A[ub_rows].multiply(flip[:, None]).tocsr() if len(ub_rows) else None
    b_ub = b[ub_rows] * flip if len(ub_rows) else None
    eq_rows = np.flatnonzero(eq)
    lb, ub = model.bounds()
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A[eq_rows] if len(eq_rows) else None,
                  b_eq=b[eq_rows] if len(eq_rows) else None,
                  bounds=list(zip(np.where(np.isfinite(lb), lb, None), np.where(np.isfinite(ub), ub, None))),
                  method="highs")
    status = _LP_STATUS.get(res.status, ITERATION_LIMIT)
    duals = np.zeros(model.num_rows)
    if status == OPTIMAL:
        if len(ub_rows):
            duals[ub_rows] = flip * res.ineqlin.marginals
        if len(eq_rows):
            duals[eq_rows] = res.eqlin.marginals
        x = np.asarray(res.x)
        obj = float(res.fun)
    else:
        x = np.full(model.num_vars, math.nan) if res.x is None else np.asarray(res.x)
        obj = {INFEASIBLE: math.inf, UNBOUNDED: -math.inf}.get(status, math.nan)
    return LPSolution(status, x, duals, obj, bound=obj, iterations=int(getattr(res, "nit", 0) or 0),
                      backend="highs", note=res.message)


def solve_mip_highs(model: LinearModel, config: MIPConfig | None = None) -> LPSolution:
    config = config or MIPConfig()
    c = model.objective()
    senses = model.senses()
    b = model.rhs()
    lo = np.array([r if s in (GE, EQ) else -np.inf for s, r in zip(senses, b)])
    hi = np.array([r if s in (LE, EQ) else np.inf for s, r in zip(senses, b)])
    lb, ub = model.bounds()
    constraints = [LinearConstraint(model.matrix(), lo, hi)] if model.num_rows else []
    options = {"time_limit": config.time_limit, "node_limit": config.node_limit,
               "mip_rel_gap": config.gap_tolerance, "disp": False}
    res = milp(c, constraints=constraints, integrality=model.integrality().astype(int),
               bounds=Bounds(lb, ub), options=options)
    bound = float(getattr(res, "mip_dual_bound", math.nan) or math.nan)
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    if res.x is None:
        status = {2: INFEASIBLE, 3: UNBOUNDED}.get(res.status, ITERATION_LIMIT)
        obj = {INFEASIBLE: math.inf, UNBOUNDED: -math.inf}.get(status, math.inf)
        return LPSolution(status, np.full(model.num_vars, math.nan), np.zeros(model.num_rows), obj,
                          bound=bound, nodes=nodes, backend="highs", note=res.message)
    x = np.asarray(res.x, dtype=float)
    integ = model.integrality()
    x = np.where(integ, np.round(x), x)
    status = OPTIMAL if res.status == 0 else ITERATION_LIMIT
    obj = float(c @ x)
    if math.isnan(bound):
        bound = obj
    return LPSolution(status, x, np.zeros(model.num_rows), obj, bound=min(bound, obj), nodes=nodes,
                      backend="highs", note=res.message)
