"""Initial columns: one dedicated route per origin-destination pair, or a greedy insertion schedule."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from ..instance import DEPOT, Commodity, Instance, dedicated_route_fits
from ..master import Schedule
from ..routing import Route, RouteInstance, is_distance_feasible, route_duration


class FleetWarning(UserWarning):
    pass


def simple_init(inst: Instance) -> list[Route]:
    pairs = sorted({(k.origin, k.destination) for k in inst.commodities})
    routes = []
    for o, d in pairs:
        r = Route.from_legs([(o, d)], inst.network)
        if not is_distance_feasible(r, 0, inst):
            raise ValueError(f"dedicated route {r} takes {route_duration(r, inst.network)} min, "
                             f"longer than a {inst.shifts.duration} min shift")
        routes.append(r)
    capacity = inst.fleet_size * inst.shifts.count
    if inst.total_units > capacity:
        warnings.warn(f"{inst.total_units} units on dedicated routes need more than the "
                      f"{capacity} truck-shifts available", FleetWarning, stacklevel=2)
    return routes


@dataclass
class InsertionResult:
    routes: list[Route]
    schedule: Schedule
    virtual_trucks: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def used_virtual_trucks(self) -> bool:
        return self.virtual_trucks > 0

    def __iter__(self):
        # allows ``routes, schedule = insertion_init(inst)``
        return iter((self.routes, self.schedule))


def _urgency(k: Commodity) -> tuple:
    return (k.deadline, k.available, k.id)


def insertion_init(inst: Instance) -> InsertionResult:
    """Greedy truck-by-truck construction with real waiting times.

    Each truck of each shift starts with the most urgent unit it can still
    deliver on time (earliest deadline, then earliest availability), then
    repeatedly appends the unit whose origin is closest to its current
    position, ties broken the same way. Units left over get a dedicated
    virtual truck in the first shift that can serve them.
    """
    net, cal = inst.network, inst.shifts
    t, mu, dist = net.service_time, net.travel_time, net.distance
    left = {k.id: k.quantity for k in inst.commodities}
    by_id = {k.id: k for k in inst.commodities}
    instances: list[RouteInstance] = []

    def reach(cur: int, clock: int, k: Commodity, end: int) -> int | None:
        at_origin = max(clock + t[cur] + mu[cur][k.origin], k.available)
        delivered = at_origin + t[k.origin] + mu[k.origin][k.destination]
        if delivered > k.deadline or delivered + t[k.destination] + mu[k.destination][DEPOT] > end:
            return None
        return delivered

    for s in range(cal.count):
        start, end = cal.start(s), cal.end(s)
        for _ in range(inst.fleet_size):
            cur, clock = DEPOT, start
            legs: list[tuple[int, int]] = []
            load: list[tuple[int, str]] = []
            while True:
                options = []
                for cid in sorted(left):
                    if not left[cid]:
                        continue
                    k = by_id[cid]
                    arrival = reach(cur, clock, k, end)
                    if arrival is None:
                        continue
                    key = _urgency(k) if not legs else (dist[cur][k.origin],) + _urgency(k)
                    options.append((key, k, arrival))
                if not options:
                    break
                _, k, arrival = min(options, key=lambda o: o[0])
                load.append((2 * len(legs) + 1, k.id))
                legs.append((k.origin, k.destination))
                left[k.id] -= 1
                cur, clock = k.destination, arrival
            if not legs:
                break
            r = Route.from_legs(legs, net)
            instances.append(RouteInstance(r, s, 1, tuple(sorted(((i, cid), 1) for i, cid in load)),
                                           trucks=(tuple(load),)))

    virtual = 0
    notes = []
    for cid in sorted(left):
        k = by_id[cid]
        while left[cid]:
            r = Route.from_legs([(k.origin, k.destination)], net)
            shifts = [sh for sh in range(cal.count) if dedicated_route_fits(net, k, cal.start(sh), cal.end(sh))]
            if not shifts:
                raise ValueError(f"commodity {cid} fits no shift even on a dedicated truck")
            instances.append(RouteInstance(r, shifts[0], 1, (((1, cid), 1),), trucks=(((1, cid),),)))
            left[cid] -= 1
            virtual += 1
    if virtual:
        notes.append(f"{virtual} units needed trucks beyond the fleet")
        warnings.warn(notes[-1], FleetWarning, stacklevel=2)

    instances.sort(key=lambda ri: (ri.shift, ri.route.nodes))
    routes = sorted({ri.route.nodes: ri.route for ri in instances}.values())
    objective = float(sum(ri.route.distance for ri in instances))
    return InsertionResult(routes, Schedule(instances, objective), virtual, notes)
