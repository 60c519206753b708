"""Problem data for the multi-shift full-truckload routing problem.

Times are integer minutes measured on one absolute clock, distances are
integer kilometres. Node 0 is the depot. The module covers the data model,
validation, the line-oriented instance file format and a seeded random
instance generator.

File format::

    # comment
    [meta]
    nodes = 5
    shifts = 1
    shift_start = 480
    shift_duration = 720
    fleet = 2
    [distance]
    0 10 24 41 14
    ...                     (one row per node)
    [travel_time]
    ...                     (same shape as [distance])
    [service_time]
    0 30 30 40 60
    [commodities]
    k1 1 2 1 820 905        (id origin destination quantity available deadline)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEPOT = 0

_SECTIONS = ("meta", "distance", "travel_time", "service_time", "commodities")
_META_KEYS = ("nodes", "shifts", "shift_start", "shift_duration", "fleet")


class ParseError(ValueError):
    """Malformed instance text. ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Network:
    node_count: int
    distance: tuple[tuple[int, ...], ...]
    travel_time: tuple[tuple[int, ...], ...]
    service_time: tuple[int, ...]

    @classmethod
    def from_arrays(cls, distance, travel_time, service_time) -> "Network":
        dist = tuple(tuple(int(v) for v in row) for row in distance)
        tt = tuple(tuple(int(v) for v in row) for row in travel_time)
        return cls(len(dist), dist, tt, tuple(int(v) for v in service_time))


@dataclass(frozen=True)
class Commodity:
    id: str
    origin: int
    destination: int
    quantity: int
    available: int
    deadline: int


@dataclass(frozen=True)
class ShiftCalendar:
    count: int
    first_start: int
    duration: int = 720

    def start(self, s: int) -> int:
        return self.first_start + s * self.duration

    def end(self, s: int) -> int:
        return self.start(s) + self.duration

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(self.start(s) for s in range(self.count))

    @property
    def horizon(self) -> tuple[int, int]:
        return self.first_start, self.first_start + self.count * self.duration


@dataclass(frozen=True)
class Instance:
    network: Network
    commodities: tuple[Commodity, ...]
    shifts: ShiftCalendar
    fleet_size: int

    @cached_property
    def _by_id(self) -> dict[str, Commodity]:
        return {k.id: k for k in self.commodities}

    def commodity(self, cid: str) -> Commodity:
        return self._by_id[cid]

    @property
    def total_units(self) -> int:
        return sum(k.quantity for k in self.commodities)

    @property
    def max_quantity(self) -> int:
        return max((k.quantity for k in self.commodities), default=0)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subject: str = ""


def dedicated_route_fits(net: Network, k: Commodity, shift_start: int, shift_end: int) -> bool:
    """True when a truck on route (0, o, d, 0) can deliver ``k`` on time inside the shift.

    The truck waits at the origin until the commodity is available, so this
    is stricter than the loading indicator alone: it also rules out windows
    too short for the trip itself.
    """
    o, d = k.origin, k.destination
    t, mu = net.service_time, net.travel_time
    at_origin = max(shift_start + t[DEPOT] + mu[DEPOT][o], k.available)
    delivered = at_origin + t[o] + mu[o][d]
    return delivered <= k.deadline and delivered + t[d] + mu[d][DEPOT] <= shift_end


def validate_instance(inst: Instance) -> list[Violation]:
    out: list[Violation] = []
    net = inst.network
    n = net.node_count
    if n < 1:
        out.append(Violation("node-count", "network needs at least the depot"))
    for name, mat in (("distance", net.distance), ("travel_time", net.travel_time)):
        if len(mat) != n or any(len(row) != n for row in mat):
            out.append(Violation("matrix-shape", f"{name} is not {n}x{n}", name))
            continue
        for i in range(n):
            if mat[i][i] != 0:
                out.append(Violation("diagonal-nonzero", f"{name}[{i}][{i}] = {mat[i][i]}", name))
            if any(v < 0 for v in mat[i]):
                out.append(Violation("negative-entry", f"{name} row {i} has a negative entry", name))
    if len(net.service_time) != n:
        out.append(Violation("matrix-shape", f"service_time has {len(net.service_time)} entries, expected {n}",
                             "service_time"))
    elif any(v < 0 for v in net.service_time):
        out.append(Violation("negative-entry", "service_time has a negative entry", "service_time"))

    cal = inst.shifts
    if cal.count < 1:
        out.append(Violation("shift-count", "at least one shift is required"))
    if cal.duration < 0:
        out.append(Violation("shift-duration", "shift duration is negative"))
    if inst.fleet_size < 1:
        out.append(Violation("fleet-size", "fleet size must be positive"))

    shapes_ok = not any(v.code == "matrix-shape" for v in out)
    h0, h1 = cal.horizon
    seen: set[str] = set()
    for k in inst.commodities:
        if k.id in seen:
            out.append(Violation("duplicate-id", f"commodity id {k.id!r} repeated", k.id))
        seen.add(k.id)
        if not (0 <= k.origin < n and 0 <= k.destination < n):
            out.append(Violation("node-range", "origin or destination outside the network", k.id))
            continue
        if k.origin == k.destination:
            out.append(Violation("self-loop", "origin equals destination", k.id))
        if k.quantity < 1:
            out.append(Violation("quantity", "quantity must be at least one unit", k.id))
        if k.available >= k.deadline:
            out.append(Violation("window-empty", "available time is not before the deadline", k.id))
            continue
        if k.available < h0 or k.deadline > h1:
            out.append(Violation("outside-horizon", "time window leaves the planning horizon", k.id))
        if shapes_ok and k.origin != k.destination and cal.count >= 1:
            if not any(dedicated_route_fits(net, k, cal.start(s), cal.end(s)) for s in range(cal.count)):
                out.append(Violation("no-shift-fits", "no shift can serve the commodity on a dedicated route",
                                     k.id))
    return out


# --------------------------------------------------------------------------
# text format


def serialize_instance(inst: Instance) -> str:
    net = inst.network
    lines = [
        "[meta]",
        f"nodes = {net.node_count}",
        f"shifts = {inst.shifts.count}",
        f"shift_start = {inst.shifts.first_start}",
        f"shift_duration = {inst.shifts.duration}",
        f"fleet = {inst.fleet_size}",
        "[distance]",
        *(" ".join(map(str, row)) for row in net.distance),
        "[travel_time]",
        *(" ".join(map(str, row)) for row in net.travel_time),
        "[service_time]",
        " ".join(map(str, net.service_time)),
        "[commodities]",
        *(f"{k.id} {k.origin} {k.destination} {k.quantity} {k.available} {k.deadline}"
          for k in inst.commodities),
    ]
    return "\n".join(lines) + "\n"


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in tokens]
    except ValueError as exc:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from exc


def parse_instance(text: str) -> Instance:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip()
            if current not in _SECTIONS:
                raise ParseError(f"unknown section [{current}]", lineno)
            if current in sections:
                raise ParseError(f"section [{current}] repeated", lineno)
            sections[current] = []
            continue
        if current is None:
            raise ParseError("content before the first section header", lineno)
        sections[current].append((lineno, line))

    for name in _SECTIONS:
        if name not in sections:
            raise ParseError(f"missing section [{name}]")

    meta: dict[str, int] = {}
    for lineno, line in sections["meta"]:
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _META_KEYS:
            raise ParseError(f"unknown meta key {key!r}", lineno)
        meta[key] = _ints([value], lineno)[0]
    for key in _META_KEYS:
        if key not in meta:
            raise ParseError(f"[meta] is missing {key!r}")
    n = meta["nodes"]

    def matrix(name: str) -> tuple[tuple[int, ...], ...]:
        rows = sections[name]
        if len(rows) != n:
            raise ParseError(f"[{name}] has {len(rows)} rows, expected {n}",
                             rows[-1][0] if rows else None)
        out = []
        for idx, (lineno, line) in enumerate(rows):
            values = _ints(line.split(), lineno)
            if len(values) != n:
                raise ParseError(f"[{name}] row {idx} has {len(values)} entries, expected {n}", lineno)
            out.append(tuple(values))
        return tuple(out)

    distance = matrix("distance")
    travel_time = matrix("travel_time")
    st_rows = sections["service_time"]
    if len(st_rows) != 1:
        raise ParseError("[service_time] must be a single row", st_rows[-1][0] if st_rows else None)
    service = _ints(st_rows[0][1].split(), st_rows[0][0])
    if len(service) != n:
        raise ParseError(f"[service_time] has {len(service)} entries, expected {n}", st_rows[0][0])

    commodities = []
    for lineno, line in sections["commodities"]:
        parts = line.split()
        if len(parts) != 6:
            raise ParseError("commodity lines are 'id origin dest qty available deadline'", lineno)
        o, d, q, a, b = _ints(parts[1:], lineno)
        commodities.append(Commodity(parts[0], o, d, q, a, b))

    return Instance(
        network=Network(n, distance, travel_time, tuple(service)),
        commodities=tuple(commodities),
        shifts=ShiftCalendar(meta["shifts"], meta["shift_start"], meta["shift_duration"]),
        fleet_size=meta["fleet"],
    )


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))


# --------------------------------------------------------------------------
# fixtures


def worked_example() -> Instance:
    """Four-commodity example with one 08:00-20:00 shift.

    Service and travel times reproduce the earliest-start rows of the four
    reference routes exactly; distances reproduce their lengths 79, 129, 64
    and 75 km. Arcs the reference routes never use are filled with the
    reverse arc's values, or with 35/25 km (50/40 min) where no reverse is
    given.
    """
    mu = {(0, 1): 15, (1, 2): 50, (2, 3): 0, (3, 4): 40, (4, 0): 40, (0, 3): 50, (4, 1): 40, (2, 0): 50}
    km = {(0, 1): 10, (1, 2): 30, (2, 0): 24, (2, 3): 5, (3, 4): 20, (4, 0): 14, (0, 3): 41, (4, 1): 14}
    filler = {(1, 3): (50, 35), (3, 1): (50, 35), (2, 4): (40, 25), (4, 2): (40, 25)}
    n = 5
    tt = [[0] * n for _ in range(n)]
    dist = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if (i, j) in mu:
                tt[i][j], dist[i][j] = mu[i, j], km[i, j]
            elif (j, i) in mu:
                tt[i][j], dist[i][j] = mu[j, i], km[j, i]
            else:
                tt[i][j], dist[i][j] = filler[i, j]
    net = Network.from_arrays(dist, tt, (0, 30, 30, 40, 60))
    h = 60
    commodities = (
        Commodity("k1", 1, 2, 1, 13 * h + 40, 15 * h + 5),
        Commodity("k2", 1, 2, 1, 8 * h, 13 * h + 10),
        Commodity("v1", 3, 4, 1, 8 * h, 16 * h),
        Commodity("v2", 3, 4, 1, 9 * h, 15 * h + 50),
    )
    return Instance(net, commodities, ShiftCalendar(1, 8 * h, 720), fleet_size=2)


WORKED_EXAMPLE_ROUTES = ((0, 1, 2, 3, 4, 0), (0, 3, 4, 1, 2, 0), (0, 1, 2, 0), (0, 3, 4, 0))


def clock(minutes: int) -> str:
    """Format absolute minutes as H:MM (hours keep counting past 24)."""
    return f"{minutes // 60}:{minutes % 60:02d}"


# --------------------------------------------------------------------------
# generator

# Default (commodity count, total units) ranges keyed by shift count.
_TABLE_RANGES = {
    4: ((50, 87), (266, 624)),
    6: ((77, 105), (489, 818)),
    8: ((106, 127), (831, 1067)),
}


@dataclass(frozen=True)
class GeneratorConfig:
    node_count: int = 7
    shift_count: int = 4
    commodity_count: tuple[int, int] | None = None  # inclusive; None = table default
    units: tuple[int, int] | None = None  # total truckload units, inclusive
    fraction_available_at_start: float = 0.30
    emergency_fraction: tuple[float, float] = (0.10, 0.30)
    emergency_window: int = 600  # windows shorter than this are emergencies
    min_window: int = 60
    distance_km: tuple[int, int] = (10, 60)
    speed_km_per_min: float = 0.5
    service_time: int = 30
    shift_start: int = 0
    shift_duration: int = 720
    quantity_spread: float = 0.35  # success probability of the geometric weights
    fleet_size: int | None = None
    fit_fleet: bool = False  # grow the default fleet until a greedy schedule needs no extra trucks
    seed: int = 0
    max_resamples: int = 200

    def ranges(self) -> tuple[tuple[int, int], tuple[int, int]]:
        if self.shift_count in _TABLE_RANGES:
            count, units = _TABLE_RANGES[self.shift_count]
        else:
            s = self.shift_count
            count, units = (12 * s, 16 * s), (70 * s, 130 * s)
        return self.commodity_count or count, self.units or units

    def problems(self) -> list[str]:
        out = []
        if self.node_count < 3:
            out.append("node_count must be at least 3 (depot plus two terminals)")
        if self.shift_count < 1 or self.shift_duration <= 0:
            out.append("need at least one shift of positive duration")
        if not 0.0 <= self.fraction_available_at_start <= 1.0:
            out.append("fraction_available_at_start must lie in [0, 1]")
        lo, hi = self.emergency_fraction
        if not 0.0 <= lo <= hi <= 1.0:
            out.append("emergency_fraction must be an ordered pair inside [0, 1]")
        (c_lo, c_hi), (u_lo, u_hi) = self.ranges()
        if not 1 <= c_lo <= c_hi:
            out.append("commodity_count range is empty")
        if not u_lo <= u_hi or u_hi < c_lo:
            out.append("units range is empty or below the commodity count")
        if not 0 <= self.distance_km[0] <= self.distance_km[1]:
            out.append("distance range is empty")
        if self.speed_km_per_min <= 0:
            out.append("speed must be positive")
        if not 0 < self.quantity_spread <= 1:
            out.append("quantity_spread must lie in (0, 1]")
        if self.min_window < 1 or self.min_window >= self.emergency_window:
            out.append("min_window must be positive and below emergency_window")
        return out


def generate_instance(cfg: GeneratorConfig) -> Instance:
    problems = cfg.problems()
    if problems:
        raise ValueError("; ".join(problems))
    rng = np.random.default_rng(cfg.seed)
    n = cfg.node_count

    dist = rng.integers(cfg.distance_km[0], cfg.distance_km[1] + 1, size=(n, n))
    np.fill_diagonal(dist, 0)
    tt = np.rint(dist / cfg.speed_km_per_min).astype(int)
    service = [0] + [cfg.service_time] * (n - 1)
    net = Network.from_arrays(dist, tt, service)

    (c_lo, c_hi), (u_lo, u_hi) = cfg.ranges()
    count = int(rng.integers(c_lo, c_hi + 1))
    total = int(rng.integers(max(u_lo, count), u_hi + 1))
    weights = rng.geometric(cfg.quantity_spread, size=count).astype(float)
    extra = rng.multinomial(total - count, weights / weights.sum())
    quantities = 1 + extra

    cal = ShiftCalendar(cfg.shift_count, cfg.shift_start, cfg.shift_duration)
    h0, h1 = cal.horizon
    span = h1 - h0
    n_start = int(round(cfg.fraction_available_at_start * count))
    frac = rng.uniform(*cfg.emergency_fraction)
    n_emerg = int(round(frac * count))
    n_emerg = min(max(n_emerg, math.ceil(cfg.emergency_fraction[0] * count)),
                  math.floor(cfg.emergency_fraction[1] * count))
    at_start = set(rng.permutation(count)[:n_start].tolist())
    emergency = set(rng.permutation(count)[:n_emerg].tolist())

    commodities = []
    for idx in range(count):
        for _ in range(cfg.max_resamples):
            o, d = (int(v) + 1 for v in rng.choice(n - 1, size=2, replace=False))
            if idx in emergency:
                width = int(rng.integers(cfg.min_window, min(cfg.emergency_window, span + 1)))
            else:
                width = int(rng.integers(min(cfg.emergency_window, span), span + 1))
            if idx in at_start:
                sigma = h0
            else:
                if h1 - width < h0 + 1:
                    width = h1 - h0 - 1
                sigma = int(rng.integers(h0 + 1, h1 - width + 1))
            k = Commodity(f"c{idx}", o, d, int(quantities[idx]), sigma, sigma + width)
            if any(dedicated_route_fits(net, k, cal.start(s), cal.end(s)) for s in range(cal.count)):
                commodities.append(k)
                break
        else:
            raise ValueError(
                f"commodity {idx}: no sampled time window fits a shift after {cfg.max_resamples} tries; "
                "widen min_window or shorten the distances")

    inst = Instance(net, tuple(commodities), cal, cfg.fleet_size or max(1, math.ceil(total / (2 * cfg.shift_count))))
    return with_fleet_that_fits(inst) if cfg.fit_fleet and not cfg.fleet_size else inst


def with_fleet_that_fits(inst: Instance) -> Instance:
    """Grow the fleet until the greedy insertion construction needs no extra trucks."""
    from .heuristics.init import insertion_init  # deferred: heuristics depend on this module

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while insertion_init(inst).virtual_trucks:
            inst = Instance(inst.network, inst.commodities, inst.shifts, inst.fleet_size + 1)
    return inst


def emergency_share(inst: Instance, threshold: int = 600) -> float:
    if not inst.commodities:
        return 0.0
    return sum(k.deadline - k.available < threshold for k in inst.commodities) / len(inst.commodities)


def with_commodities(inst: Instance, commodities: Iterable[Commodity]) -> Instance:
    return Instance(inst.network, tuple(commodities), inst.shifts, inst.fleet_size)
