"""Routes in duplicated-node encoding, time windows and push-back logic.

A route is a depot-to-depot node sequence ``(0, o1, d1, o2, d2, ..., 0)``.
Odd indices are loading positions, the even index after each one is the
matching unloading position. A terminal that unloads and then loads again
simply appears twice in a row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .instance import DEPOT, Commodity, Instance, Network

# (loading index, commodity id) -> units
FlowAssignment = Mapping[tuple[int, str], int]


class RouteBudgetExceeded(RuntimeError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"route enumeration stopped at {count} routes (limit {limit})")


@dataclass(frozen=True, order=True)
class Route:
    nodes: tuple[int, ...]
    distance: int = field(compare=False)

    @classmethod
    def from_nodes(cls, nodes: Sequence[int], net: Network) -> "Route":
        nodes = tuple(int(v) for v in nodes)
        check_route_nodes(nodes, net.node_count)
        return cls(nodes, route_distance(nodes, net))

    @classmethod
    def from_legs(cls, legs: Iterable[tuple[int, int]], net: Network) -> "Route":
        nodes = [DEPOT]
        for o, d in legs:
            nodes += [o, d]
        nodes.append(DEPOT)
        return cls(tuple(nodes), route_distance(nodes, net))

    @property
    def legs(self) -> tuple[tuple[int, int], ...]:
        n = self.nodes
        return tuple((n[p], n[p + 1]) for p in range(1, len(n) - 1, 2))

    @property
    def positions(self) -> range:
        """Loading indices."""
        return range(1, len(self.nodes) - 1, 2)

    def __str__(self) -> str:
        return ",".join(map(str, self.nodes))


def check_route_nodes(nodes: Sequence[int], node_count: int | None = None) -> None:
    if len(nodes) < 2 or nodes[0] != DEPOT or nodes[-1] != DEPOT:
        raise ValueError(f"route {tuple(nodes)} must start and end at the depot")
    if len(nodes) % 2:
        raise ValueError(f"route {tuple(nodes)} has odd length; expected depot, loaded legs, depot")
    if node_count is not None and any(not 0 <= v < node_count for v in nodes):
        raise ValueError(f"route {tuple(nodes)} references a node outside the network")


def route_distance(nodes: Sequence[int], net: Network) -> int:
    dist = net.distance
    return sum(dist[a][b] for a, b in zip(nodes, nodes[1:]))


@dataclass(frozen=True)
class RouteTiming:
    e: tuple[int, ...]
    l: tuple[int, ...]
    shift: int


def _head_tail(nodes: Sequence[int], net: Network) -> tuple[list[int], list[int]]:
    # head[i] = e[i] - shift_start, tail[i] = shift_end - l[i]
    t, mu = net.service_time, net.travel_time
    m = len(nodes)
    head = [0] * m
    tail = [0] * m
    for p in range(1, m):
        a, b = nodes[p - 1], nodes[p]
        head[p] = head[p - 1] + t[a] + mu[a][b]
    for p in range(m - 2, -1, -1):
        a, b = nodes[p], nodes[p + 1]
        tail[p] = tail[p + 1] + t[b] + mu[a][b]
    return head, tail


def compute_time_windows(route: Route, shift: int, inst: Instance) -> RouteTiming:
    start, end = inst.shifts.start(shift), inst.shifts.end(shift)
    head, tail = _head_tail(route.nodes, inst.network)
    return RouteTiming(tuple(start + h for h in head), tuple(end - q for q in tail), shift)


def route_duration(route: Route | Sequence[int], net: Network) -> int:
    """Minutes from leaving the depot until arriving back (e[last] - e[0])."""
    nodes = route.nodes if isinstance(route, Route) else route
    t, mu = net.service_time, net.travel_time
    return sum(t[a] + mu[a][b] for a, b in zip(nodes, nodes[1:]))


def is_distance_feasible(route: Route, shift: int, inst: Instance) -> bool:
    return route_duration(route, inst.network) <= inst.shifts.duration


def service_feasible(route: Route, i: int, k: Commodity, shift: int, inst: Instance,
                     timing: RouteTiming | None = None) -> bool:
    """Loading indicator: can ``k`` be loaded at index ``i`` of ``route`` in ``shift``."""
    nodes = route.nodes
    if not 0 <= i < len(nodes):
        raise IndexError(f"index {i} outside route of length {len(nodes)}")
    if i % 2 != 1 or i + 1 >= len(nodes):
        return False
    if nodes[i] != k.origin or nodes[i + 1] != k.destination:
        return False
    timing = timing or compute_time_windows(route, shift, inst)
    t_i = inst.network.service_time[nodes[i]]
    return timing.l[i] >= k.available + t_i and timing.e[i + 1] <= k.deadline


class ServiceIndex:
    """Per-instance cache of which commodities each route position can load, per shift.

    ``table(route)`` maps every loading index to ``(commodity, shifts)`` pairs
    where ``shifts`` is the frozenset of shifts whose loading indicator is 1.
    Commodities feasible in no shift are dropped.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        self.by_pair: dict[tuple[int, int], list[Commodity]] = {}
        for k in inst.commodities:
            self.by_pair.setdefault((k.origin, k.destination), []).append(k)
        self._cache: dict[tuple[int, ...], dict[int, tuple[tuple[Commodity, frozenset[int]], ...]]] = {}

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.by_pair)

    def table(self, route: Route) -> dict[int, tuple[tuple[Commodity, frozenset[int]], ...]]:
        hit = self._cache.get(route.nodes)
        if hit is not None:
            return hit
        inst = self.inst
        net, cal = inst.network, inst.shifts
        nodes = route.nodes
        head, tail = _head_tail(nodes, net)
        out: dict[int, tuple[tuple[Commodity, frozenset[int]], ...]] = {}
        if head[-1] <= cal.duration:
            for j in range(1, len(nodes) - 1, 2):
                t_j = net.service_time[nodes[j]]
                entries = []
                for k in self.by_pair.get((nodes[j], nodes[j + 1]), ()):
                    shifts = frozenset(
                        s for s in range(cal.count)
                        if cal.end(s) - tail[j] >= k.available + t_j and cal.start(s) + head[j + 1] <= k.deadline
                    )
                    if shifts:
                        entries.append((k, shifts))
                out[j] = tuple(entries)
        self._cache[nodes] = out
        return out

    def candidates(self, route: Route) -> dict[int, tuple[Commodity, ...]]:
        """Commodities loadable at each position in at least one shift."""
        return {j: tuple(k for k, _ in entries) for j, entries in self.table(route).items()}

    def delta(self, route: Route, shift: int) -> dict[int, tuple[Commodity, ...]]:
        return {j: tuple(k for k, shifts in entries if shift in shifts)
                for j, entries in self.table(route).items()}

    def serves_every_leg(self, route: Route) -> bool:
        tab = self.table(route)
        return bool(tab) and all(tab.values())


# --------------------------------------------------------------------------
# enumeration


def enumerate_routes(inst: Instance, shift_duration: int | None = None, *,
                     legs: Iterable[tuple[int, int]] | None = None,
                     max_legs: int = 12, max_routes: int = 500_000) -> list[Route]:
    """All distance-wise feasible routes built from loaded legs.

    ``legs`` defaults to the distinct origin-destination pairs of the
    commodities. Depth-first extension one leg at a time; a prefix is pruned
    once no completion can be back at the depot within ``shift_duration``.
    """
    net = inst.network
    duration = inst.shifts.duration if shift_duration is None else shift_duration
    legs = sorted(set(legs if legs is not None else ((k.origin, k.destination) for k in inst.commodities)))
    t, mu = net.service_time, net.travel_time
    min_return = min(t[x] + mu[x][DEPOT] for x in range(net.node_count))
    found: list[tuple[int, ...]] = []

    def extend(nodes: list[int], clock: int, depth: int) -> None:
        cur = nodes[-1]
        for o, d in legs:
            e_o = clock + t[cur] + mu[cur][o]
            e_d = e_o + t[o] + mu[o][d]
            if e_d + min_return > duration:
                continue
            nodes += (o, d)
            if e_d + t[d] + mu[d][DEPOT] <= duration:
                found.append(tuple(nodes) + (DEPOT,))
                if len(found) > max_routes:
                    raise RouteBudgetExceeded(len(found), max_routes)
            if depth + 1 < max_legs:
                extend(nodes, e_d, depth + 1)
            del nodes[-2:]

    if max_legs > 0:
        extend([DEPOT], 0, 0)
    found.sort()
    return [Route(nodes, route_distance(nodes, net)) for nodes in found]


def write_route_cache(routes: Iterable[Route], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in sorted(routes):
            fh.write(f"{r} {r.distance}\n")


def read_route_cache(path) -> list[Route]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                nodes, dist = line.split()
                route = Route(tuple(int(v) for v in nodes.split(",")), int(dist))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: expected 'n0,n1,...,0 distance'") from exc
            check_route_nodes(route.nodes)
            out.append(route)
    return out


# --------------------------------------------------------------------------
# push-back and incompatibilities


def _loads(flows: FlowAssignment) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    for (i, cid), units in flows.items():
        if units > 0:
            out.setdefault(i, []).append(cid)
    return out


def _pushed(nodes: Sequence[int], e: Sequence[int], loads: Mapping[int, Sequence[str]], inst: Instance) -> list[int]:
    out = list(e)
    delay = 0
    for p in range(1, len(nodes)):
        out[p] = e[p] + delay
        if p in loads:
            latest = max(inst.commodity(cid).available for cid in loads[p])
            if latest > out[p]:
                delay += latest - out[p]
                out[p] = latest
    return out


def propagate_push_back(route: Route, timing: RouteTiming, flows: FlowAssignment,
                        shift: int, inst: Instance) -> tuple[int, ...]:
    """Earliest service starts after waiting for late commodities.

    At a loading index the truck waits until the latest availability among
    the commodities it loads there; the wait carries over unchanged to every
    later index.
    """
    return tuple(_pushed(route.nodes, timing.e, _loads(flows), inst))


@dataclass(frozen=True)
class IncompatiblePair:
    route: Route
    shift: int
    i: int
    k: str
    j: int
    v: str
    k_push_back: int
    v_acceptable_push_back: int

    @property
    def key(self) -> tuple:
        return (self.route.nodes, self.shift, self.i, self.k, self.j, self.v)


def detect_incompatibilities(route: Route, flows: FlowAssignment, shift: int, inst: Instance,
                             timing: RouteTiming | None = None) -> list[IncompatiblePair]:
    """Commodity pairs that cannot share this route instance.

    A loaded commodity ``k`` at index ``i`` with ``available > e[i]`` forces a
    wait of ``available - e[i]`` on its own. A commodity ``v`` loaded at
    ``j >= i`` whose delivery is late once every wait is propagated tolerates
    a wait of ``deadline - e[j+1]``. Each pair where the first wait exceeds
    the second tolerance is reported. Because waits combine by maximum along
    a route, the pairs are exactly the minimal conflicts: no pair means the
    assignment is on time.
    """
    timing = timing or compute_time_windows(route, shift, inst)
    e = timing.e
    loads = _loads(flows)
    pushed = _pushed(route.nodes, e, loads, inst)
    waits = []
    late = []
    for p in sorted(loads):
        for cid in sorted(loads[p]):
            c = inst.commodity(cid)
            if c.available > e[p]:
                waits.append((p, cid, c.available - e[p]))
            if c.deadline < pushed[p + 1]:
                late.append((p, cid, c.deadline - e[p + 1]))
    pairs = [
        IncompatiblePair(route, shift, i, k, j, v, push, slack)
        for i, k, push in waits
        for j, v, slack in late
        if i <= j and push > slack
    ]
    pairs.sort(key=lambda q: (q.i, q.k, q.j, q.v))
    return pairs


# --------------------------------------------------------------------------
# route instances and schedule simulation


@dataclass(frozen=True)
class RouteInstance:
    """``count`` trucks driving ``route`` in ``shift`` with aggregate flows.

    ``trucks`` optionally pins the per-truck loads (index -> commodity id);
    otherwise units are dealt to trucks round-robin.
    """

    route: Route
    shift: int
    count: int
    flows: tuple[tuple[tuple[int, str], int], ...] = ()
    trucks: tuple[tuple[tuple[int, str], ...], ...] | None = None

    @property
    def flow_map(self) -> dict[tuple[int, str], int]:
        return dict(self.flows)

    def truck_loads(self) -> list[dict[int, str]]:
        if self.trucks is not None:
            return [dict(t) for t in self.trucks]
        loads: list[dict[int, str]] = [{} for _ in range(self.count)]
        by_pos: dict[int, list[str]] = {}
        for (i, cid), units in sorted(self.flows):
            by_pos.setdefault(i, []).extend([cid] * units)
        for i, units in by_pos.items():
            for u, cid in enumerate(units):
                if self.count:
                    loads[u % self.count].setdefault(i, cid)
        return loads


@dataclass(frozen=True)
class Delivery:
    commodity: str
    shift: int
    route: tuple[int, ...]
    truck: int
    index: int
    delivered_at: int


@dataclass(frozen=True)
class ScheduleViolation:
    kind: str  # deadline | capacity | mismatch | shift-overrun | infeasible-route
    commodity: str
    shift: int
    route: tuple[int, ...]
    truck: int
    index: int
    detail: str


@dataclass
class SimulationReport:
    violations: list[ScheduleViolation]
    deliveries: list[Delivery]

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def completion_times(self) -> dict[str, int]:
        """Latest delivery minute per commodity."""
        out: dict[str, int] = {}
        for d in self.deliveries:
            out[d.commodity] = max(out.get(d.commodity, d.delivered_at), d.delivered_at)
        return out


def iter_route_instances(schedule) -> Iterator[RouteInstance]:
    yield from getattr(schedule, "instances", schedule)


def simulate_schedule(schedule, inst: Instance) -> SimulationReport:
    """Replay every truck of every route instance with waits for late commodities.

    Independent of the cut logic: only the recursions and the commodity
    windows are used. ``schedule`` is a master Schedule or any iterable of
    RouteInstance.
    """
    violations: list[ScheduleViolation] = []
    deliveries: list[Delivery] = []
    cal = inst.shifts
    for ri in iter_route_instances(schedule):
        nodes = ri.route.nodes
        timing = compute_time_windows(ri.route, ri.shift, inst)
        if timing.e[-1] > cal.end(ri.shift):
            violations.append(ScheduleViolation("infeasible-route", "", ri.shift, nodes, -1, len(nodes) - 1,
                                                f"returns at {timing.e[-1]} after shift end {cal.end(ri.shift)}"))
        per_pos: dict[int, int] = {}
        for (i, _), units in ri.flows:
            per_pos[i] = per_pos.get(i, 0) + units
        for i, units in sorted(per_pos.items()):
            if units > ri.count:
                violations.append(ScheduleViolation("capacity", "", ri.shift, nodes, -1, i,
                                                    f"{units} units on {ri.count} trucks"))
        for truck, load in enumerate(ri.truck_loads()):
            loads = {}
            for i, cid in load.items():
                c = inst.commodity(cid)
                if i % 2 != 1 or i + 1 >= len(nodes) or nodes[i] != c.origin or nodes[i + 1] != c.destination:
                    violations.append(ScheduleViolation("mismatch", cid, ri.shift, nodes, truck, i,
                                                        "origin/destination do not match the leg"))
                    continue
                loads[i] = [cid]
            pushed = _pushed(nodes, timing.e, loads, inst)
            for i, (cid,) in sorted(loads.items()):
                c = inst.commodity(cid)
                deliveries.append(Delivery(cid, ri.shift, nodes, truck, i, pushed[i + 1]))
                if pushed[i + 1] > c.deadline:
                    violations.append(ScheduleViolation("deadline", cid, ri.shift, nodes, truck, i,
                                                        f"delivered at {pushed[i + 1]}, deadline {c.deadline}"))
            if pushed[-1] > cal.end(ri.shift):
                violations.append(ScheduleViolation("shift-overrun", "", ri.shift, nodes, truck, len(nodes) - 1,
                                                    f"back at depot at {pushed[-1]}"))
    return SimulationReport(violations, deliveries)
