from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from .model import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearModel, LPSolution
from .simplex import solve_arrays


@dataclass(frozen=True)
class MIPConfig:
    gap_tolerance: float = 1e-9  # relative
    node_limit: int = 200_000
    time_limit: float = 300.0  # seconds
    integrality_tolerance: float = 1e-6


def _has_integral_objective(c: np.ndarray, integ: np.ndarray) -> bool:
    if np.any(c[~integ] != 0):
        return False
    return bool(np.all(np.abs(c - np.round(c)) < 1e-12))


def branch_and_bound(model: LinearModel, config: MIPConfig | None = None) -> LPSolution:
    """Best-first branch and bound with depth-first plunging.

    Branches on the most fractional integer variable (lowest index on ties);
    after branching the search dives into the child on the rounding side and
    parks the sibling in a heap keyed by its parent's bound.
    """
    config = config or MIPConfig()
    started = time.monotonic()
    c = model.objective()
    A = model.matrix().toarray()
    senses, b = model.senses(), model.rhs()
    lb0, ub0 = model.bounds()
    integ = model.integrality()
    lb0 = np.where(integ, np.ceil(lb0 - config.integrality_tolerance), lb0)
    ub0 = np.where(integ, np.floor(ub0 + config.integrality_tolerance), ub0)
    int_obj = _has_integral_objective(c, integ)
    tol = config.integrality_tolerance

    incumbent: np.ndarray | None = None
    inc_obj = math.inf
    nodes = branches = iterations = 0
    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    seq = 0

    def prunable(bound: float) -> bool:
        if incumbent is None:
            return False
        if int_obj:
            return bound > inc_obj - 1 + 1e-6
        return bound >= inc_obj - config.gap_tolerance * max(1.0, abs(inc_obj))

    def global_bound(current: float) -> float:
        return min([current] + [h[0] for h in heap])

    current: tuple[float, np.ndarray, np.ndarray] | None = (-math.inf, lb0, ub0)
    limit_hit = ""
    root_status = None
    while True:
        if current is None:
            while heap and prunable(heap[0][0]):
                heapq.heappop(heap)
            if not heap:
                break
            pb, _, lb, ub = heapq.heappop(heap)
            current = (pb, lb, ub)
        parent_bound, lb, ub = current
        current = None
        if nodes >= config.node_limit:
            limit_hit = "node limit"
        elif time.monotonic() - started > config.time_limit:
            limit_hit = "time limit"
        if limit_hit:
            seq += 1
            heapq.heappush(heap, (parent_bound, seq, lb, ub))
            break
        if np.any(lb > ub):
            continue
        status, x, _, obj, its = solve_arrays(c, A, senses, b, lb, ub)
        nodes += 1
        iterations += its
        if root_status is None:
            root_status = status
            if status == UNBOUNDED:
                return LPSolution(UNBOUNDED, x, np.zeros(len(b)), -math.inf, bound=-math.inf, nodes=nodes,
                                  iterations=iterations, note="LP relaxation unbounded")
        if status != OPTIMAL or prunable(obj):
            continue
        frac = np.abs(x - np.round(x))
        frac[~integ] = 0.0
        if frac.max(initial=0.0) <= tol:
            xr = np.where(integ, np.round(x), x)
            val = float(c @ xr)
            if val < inc_obj:
                incumbent, inc_obj = xr, val
            if incumbent is not None and inc_obj - global_bound(math.inf) <= config.gap_tolerance * max(1.0, abs(inc_obj)):
                heap.clear()
            continue
        # most fractional, lowest index on ties
        closeness = np.where(integ & (frac > tol), np.abs(x - np.floor(x) - 0.5), math.inf)
        j = int(np.argmin(closeness))
        branches += 1
        down_ub = ub.copy()
        down_ub[j] = math.floor(x[j])
        up_lb = lb.copy()
        up_lb[j] = math.ceil(x[j])
        down, up = (lb, down_ub), (up_lb, ub)
        dive, park = (up, down) if x[j] - math.floor(x[j]) >= 0.5 else (down, up)
        seq += 1
        heapq.heappush(heap, (obj, seq, park[0], park[1]))
        current = (obj, dive[0], dive[1])

    bound = global_bound(inc_obj) if limit_hit else inc_obj
    stats = {"branches": branches}
    if incumbent is None:
        if limit_hit:
            return LPSolution(ITERATION_LIMIT, np.full(len(c), math.nan), np.zeros(len(b)), math.inf,
                              bound=bound, nodes=nodes, iterations=iterations, note=limit_hit, stats=stats)
        return LPSolution(INFEASIBLE, np.full(len(c), math.nan), np.zeros(len(b)), math.inf, bound=math.inf,
                          nodes=nodes, iterations=iterations, stats=stats)
    status = ITERATION_LIMIT if limit_hit else OPTIMAL
    return LPSolution(status, incumbent, np.zeros(len(b)), inc_obj, bound=min(bound, inc_obj), nodes=nodes,
                      iterations=iterations, note=limit_hit, stats=stats)
