"""Reduced costs of candidate routes.

Exact pricing treats a route in a shift together with one unit of flow per
assigned loading position as a single composite column. Its reduced cost is
separable per position, so the best assignment is picked position by position.

The estimates ``p1`` (plain average of commodity prices per position) and
``p2`` (quantity-weighted average) only need the demand prices and the set of
commodities loadable at each position in any shift.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .instance import Instance
from .master import DualValues
from .routing import Route, ServiceIndex

P1, P2, ENUM, RANDOM = "p1", "p2", "enum", "random"
PRICING_MODES = (P1, P2, ENUM, RANDOM)

# position -> commodity id, or None for an empty position
Assignment = Mapping[int, str | None]


@dataclass(frozen=True)
class PricedColumn:
    route: Route
    shift: int
    assignment: tuple[tuple[int, str | None], ...]
    value: float


def _index(inst: Instance, index: ServiceIndex | None) -> ServiceIndex:
    return index if index is not None else ServiceIndex(inst)


def reduced_cost_exact(route: Route, assignment: Assignment, duals: DualValues, shift: int,
                       inst: Instance, index: ServiceIndex | None = None) -> float:
    index = _index(inst, index)
    allowed = index.delta(route, shift)
    if not allowed and len(route.nodes) > 2:
        raise ValueError(f"route {route} is not distance-wise feasible")
    extra = set(assignment) - set(route.positions)
    if extra:
        raise ValueError(f"assignment uses non-loading indices {sorted(extra)}")
    value = route.distance + duals.a(shift)
    for j in route.positions:
        ok = {k.id for k in allowed.get(j, ())}
        for cid in ok:
            value -= duals.g(route, j, cid, shift)
        cid = assignment.get(j)
        if cid is None:
            value -= duals.b(route, j, shift)
        elif cid not in ok:
            raise ValueError(f"commodity {cid} cannot be loaded at index {j} of {route} in shift {shift}")
        else:
            value += duals.g(route, j, cid, shift) - duals.p(cid)
    return value


def best_assignment(route: Route, duals: DualValues, shift: int, inst: Instance,
                    index: ServiceIndex | None = None) -> tuple[tuple[tuple[int, str | None], ...], float]:
    """Cheapest assignment for the route in one shift and its exact reduced cost."""
    index = _index(inst, index)
    allowed = index.delta(route, shift)
    chosen = []
    for j in route.positions:
        best_cid, best = None, -duals.b(route, j, shift)
        for k in sorted(allowed.get(j, ()), key=lambda c: c.id):
            v = duals.g(route, j, k.id, shift) - duals.p(k.id)
            if v < best:
                best_cid, best = k.id, v
        chosen.append((j, best_cid))
    assignment = tuple(chosen)
    return assignment, reduced_cost_exact(route, dict(assignment), duals, shift, inst, index)


def iter_assignments(route: Route, shift: int, inst: Instance,
                     index: ServiceIndex | None = None) -> Iterable[dict[int, str | None]]:
    """Every feasible assignment of the route in a shift, empty positions included."""
    allowed = _index(inst, index).delta(route, shift)
    positions = list(route.positions)
    options = [[None] + sorted(k.id for k in allowed.get(j, ())) for j in positions]
    for combo in itertools.product(*options):
        yield dict(zip(positions, combo))


def reduced_cost_shift_avg(route: Route, duals: DualValues, inst: Instance,
                           assignment: Assignment | None = None, index: ServiceIndex | None = None) -> float:
    """Mean over shifts of the exact reduced cost (best assignment per shift unless one is given)."""
    index = _index(inst, index)
    values = []
    for s in range(inst.shifts.count):
        if assignment is None:
            values.append(best_assignment(route, duals, s, inst, index)[1])
        else:
            values.append(reduced_cost_exact(route, assignment, duals, s, inst, index))
    return sum(values) / len(values)


def _estimate(route: Route, pi: Mapping[str, float], inst: Instance, index: ServiceIndex, weighted: bool) -> float:
    value = float(route.distance)
    for ks in index.candidates(route).values():
        if not ks:
            continue
        prices = [pi.get(k.id, 0.0) for k in ks]
        qty = [k.quantity for k in ks]
        if weighted and len(set(qty)) > 1:
            value -= sum(q * p for q, p in zip(qty, prices)) / sum(qty)
        else:
            # equal weights reduce to the plain mean; computed identically so both agree bit for bit
            value -= sum(prices) / len(prices)
    return value


def reduced_cost_avg(route: Route, duals: DualValues | Mapping[str, float], inst: Instance,
                     index: ServiceIndex | None = None) -> float:
    pi = duals.pi if isinstance(duals, DualValues) else duals
    return _estimate(route, pi, inst, _index(inst, index), weighted=False)


def reduced_cost_weighted(route: Route, duals: DualValues | Mapping[str, float], inst: Instance,
                          index: ServiceIndex | None = None) -> float:
    pi = duals.pi if isinstance(duals, DualValues) else duals
    return _estimate(route, pi, inst, _index(inst, index), weighted=True)


class Estimator:
    """Estimated reduced cost under fixed duals, memoised per route."""

    def __init__(self, inst: Instance, duals: DualValues, mode: str = P2, index: ServiceIndex | None = None):
        if mode not in (P1, P2):
            raise ValueError(f"estimates exist for p1 and p2, not {mode!r}")
        self.inst = inst
        self.duals = duals
        self.mode = mode
        self.index = _index(inst, index)
        self._memo: dict[tuple[int, ...], float] = {}
        self.evaluations = 0

    def __call__(self, route: Route) -> float:
        hit = self._memo.get(route.nodes)
        if hit is None:
            self.evaluations += 1
            hit = _estimate(route, self.duals.pi, self.inst, self.index, weighted=self.mode == P2)
            self._memo[route.nodes] = hit
        return hit


def price_by_estimate(routes: Iterable[Route], estimator: Estimator, max_columns: int,
                      exclude: Iterable[Route] = ()) -> list[tuple[Route, float]]:
    """The ``max_columns`` most negative estimates among routes not excluded."""
    skip = {r.nodes for r in exclude}
    found = [(estimator(r), r) for r in routes if r.nodes not in skip]
    found = [(v, r) for v, r in found if v < 0]
    found.sort(key=lambda vr: (vr[0], vr[1].nodes))
    return [(r, v) for v, r in found[:max_columns]]


def price_by_enumeration(routes: Iterable[Route], duals: DualValues, max_columns: int, inst: Instance,
                         index: ServiceIndex | None = None, exclude: Iterable[Route] = (),
                         tol: float = 1e-9) -> list[PricedColumn]:
    """Exact pricing over a route set.

    For every route and shift the cheapest assignment is found; the most
    negative columns are returned, ordered by (value, route, shift). An empty
    result certifies that no route in the set prices below ``-tol``.
    """
    index = _index(inst, index)
    skip = {r.nodes for r in exclude}
    found = []
    for r in sorted(routes):
        if r.nodes in skip or not index.table(r):
            continue
        best = None
        for s in range(inst.shifts.count):
            assignment, value = best_assignment(r, duals, s, inst, index)
            if best is None or value < best.value:
                best = PricedColumn(r, s, assignment, value)
        if best is not None and best.value < -tol:
            found.append(best)
    found.sort(key=lambda c: (c.value, c.route.nodes, c.shift))
    return found[:max_columns]


def price_random_ablation(routes: Sequence[Route], rng: np.random.Generator, max_columns: int) -> list[Route]:
    """Uniform sample without replacement, in draw order."""
    routes = list(routes)
    if max_columns >= len(routes):
        return routes
    picks = rng.choice(len(routes), size=max_columns, replace=False)
    return [routes[int(i)] for i in picks]


def min_estimate(routes: Iterable[Route], estimator: Estimator) -> float:
    return min((estimator(r) for r in routes), default=math.inf)
