"""Variable neighbourhood descent over the incumbent's routes.

Neighbourhoods are tried in the order swap, 2-opt, relocate. Every usable
route produced by a neighbourhood is priced; whenever the best estimate found
so far strictly improves, the working set becomes the incumbent routes plus
the best routes found and the search restarts at the first neighbourhood.
There is no shaking step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ..instance import Instance
from ..master import ColumnPool, DualValues
from ..pricing import P2, Estimator
from ..routing import Route, ServiceIndex
from .common import Builder, Legs, build_pool, relocate_moves, routes_of, swap_moves, two_opt_moves

NEIGHBOURHOODS = ("swap", "2-opt", "relocate")


@dataclass(frozen=True)
class VNSParams:
    max_columns: int = 1000
    neighbourhoods: tuple[str, ...] = NEIGHBOURHOODS
    pricing: str = P2
    max_resets: int = 50
    max_working: int | None = None  # cap on the working set; None = |incumbent routes|

    def __post_init__(self):
        if self.max_columns < 1:
            raise ValueError("max_columns must be at least 1")
        unknown = set(self.neighbourhoods) - set(NEIGHBOURHOODS)
        if unknown or not self.neighbourhoods:
            raise ValueError(f"unknown neighbourhoods {sorted(unknown)}")
        if self.max_resets < 0:
            raise ValueError("max_resets must be non-negative")


def _neighbours(name: str, working: list[Legs]) -> Iterable[Legs]:
    if name == "2-opt":
        for a in working:
            yield from two_opt_moves(a)
        return
    moves = swap_moves if name == "swap" else relocate_moves
    for p, a in enumerate(working):
        for q, b in enumerate(working):
            if p == q or (name == "swap" and q < p):
                continue
            for a2, b2 in moves(a, b):
                if a2:
                    yield a2
                yield b2


def vns_generate(z, duals: DualValues, params: VNSParams, inst: Instance, *,
                 index: ServiceIndex | None = None, trace: list | None = None) -> ColumnPool:
    base = routes_of(z)
    if not base:
        raise ValueError("the incumbent has no routes")
    index = index or ServiceIndex(inst)
    estimate = Estimator(inst, duals, params.pricing, index)
    builder = Builder(inst, index)
    base_nodes = {r.nodes for r in base}
    found: dict[tuple[int, ...], tuple[float, Route]] = {}
    seen: set[tuple[int, ...]] = set(base_nodes)
    width = params.max_working or len(base)

    working = [r.legs for r in base]
    best = min(estimate(r) for r in base)
    if trace is not None:
        trace.append({"reset": 0, "neighbourhood": "", "best_estimate": best, "found": 0})
    resets = 0
    k = 0
    while k < len(params.neighbourhoods):
        name = params.neighbourhoods[k]
        round_best = math.inf
        for legs in _neighbours(name, working):
            r = builder.route(legs)
            if r.nodes in seen:
                continue
            seen.add(r.nodes)
            if not builder.usable(r):
                continue
            value = estimate(r)
            round_best = min(round_best, value)
            if value < 0:
                found[r.nodes] = (value, r)
        if round_best < best:
            best = round_best
            resets += 1
            top = sorted(found.values(), key=lambda vr: (vr[0], vr[1].nodes))[:width]
            working = [r.legs for r in base] + [r.legs for _, r in top]
            if trace is not None:
                trace.append({"reset": resets, "neighbourhood": name, "best_estimate": best, "found": len(found)})
            if resets >= params.max_resets:
                break
            k = 0
        else:
            k += 1
    return build_pool(found, base, params.max_columns)
