"""Leg-level route surgery shared by the generators."""

from __future__ import annotations

import csv
import math
from typing import Callable, Iterable, Sequence

from ..instance import Instance
from ..master import ColumnPool, Schedule
from ..routing import Route, ServiceIndex, is_distance_feasible

Legs = tuple[tuple[int, int], ...]


def routes_of(z) -> list[Route]:
    """Distinct routes of a schedule, or of any iterable of routes."""
    if isinstance(z, Schedule):
        return z.routes
    seen: dict[tuple[int, ...], Route] = {}
    for r in z:
        seen.setdefault(r.nodes, r)
    return list(seen.values())


class Builder:
    """Turns leg tuples into routes and screens them.

    A usable route is distance-wise feasible and every leg can load some
    commodity in at least one shift.
    """

    def __init__(self, inst: Instance, index: ServiceIndex):
        self.inst = inst
        self.index = index
        self._routes: dict[Legs, Route] = {}

    def route(self, legs: Sequence[tuple[int, int]]) -> Route:
        legs = tuple(legs)
        r = self._routes.get(legs)
        if r is None:
            r = Route.from_legs(legs, self.inst.network)
            self._routes[legs] = r
        return r

    def usable(self, route: Route) -> bool:
        return bool(route.legs) and is_distance_feasible(route, 0, self.inst) and self.index.serves_every_leg(route)


def swap_moves(a: Legs, b: Legs) -> Iterable[tuple[Legs, Legs]]:
    """Exchange one leg of ``a`` with one leg of ``b``."""
    for p in range(len(a)):
        for q in range(len(b)):
            if a[p] == b[q]:
                continue
            yield a[:p] + (b[q],) + a[p + 1:], b[:q] + (a[p],) + b[q + 1:]


def two_opt_moves(a: Legs) -> Iterable[Legs]:
    """Exchange the positions of two legs within one route."""
    for p in range(len(a)):
        for q in range(p + 1, len(a)):
            if a[p] != a[q]:
                out = list(a)
                out[p], out[q] = out[q], out[p]
                yield tuple(out)


def relocate_moves(a: Legs, b: Legs) -> Iterable[tuple[Legs, Legs]]:
    """Move one leg of ``a`` into every slot of ``b``."""
    for p in range(len(a)):
        rest = a[:p] + a[p + 1:]
        for q in range(len(b) + 1):
            yield rest, b[:q] + (a[p],) + b[q:]


def build_pool(found: dict[tuple[int, ...], tuple[float, Route]], base: Sequence[Route],
               max_columns: int) -> ColumnPool:
    """Best ``max_columns`` negative routes (ascending estimate), then the incumbent routes."""
    best = sorted(found.values(), key=lambda vr: (vr[0], vr[1].nodes))[:max_columns]
    pool = ColumnPool()
    for value, r in best:
        pool.add(r, estimate=value)
    for r in base:
        pool.add(r)
    return pool


def write_trace(rows: Sequence[dict], path) -> None:
    if not rows:
        open(path, "w").close()
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def finite_or_inf(f: Callable[[Route], float], builder: Builder, legs: Legs) -> float:
    r = builder.route(legs)
    return f(r) if builder.usable(r) else math.inf
