"""Genetic column generator.

The population starts as the incumbent's distinct routes. Each generation
breeds ``population_size`` offspring in pairs: two tournament winners are
recombined by a two-point crossover on leg boundaries, each child may get a
2-opt mutation, then the pair is improved by best-improvement inter-route leg
swaps. Children with negative fitness (estimated reduced cost) join the
population and the pool.

Random draws per pair, in order: tournament 1, tournament 2, cut start and
length in parent 1, cut start and length in parent 2, then for each child a
mutation coin and, when it lands, the two leg positions. Tournament entrants
are drawn with replacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..instance import Instance
from ..master import ColumnPool, DualValues
from ..pricing import P2, Estimator
from ..routing import Route, ServiceIndex
from .common import Builder, Legs, build_pool, routes_of, swap_moves


@dataclass(frozen=True)
class GAParams:
    population_size: int = 500
    generations: int = 500
    mutation_rate: float = 0.02
    tournament_rate: float = 0.1
    max_columns: int = 1000
    seed: int = 0
    max_segment: int = 2
    pricing: str = P2

    def __post_init__(self):
        if not (0 <= self.mutation_rate <= 1 and 0 <= self.tournament_rate <= 1):
            raise ValueError("rates must lie in [0, 1]")
        if min(self.population_size, self.generations, self.max_columns) < 1:
            raise ValueError("sizes must be at least 1")
        if self.max_segment < 0:
            raise ValueError("max_segment must be non-negative")


class _Search:
    def __init__(self, inst: Instance, duals: DualValues, params: GAParams, index: ServiceIndex):
        self.params = params
        self.builder = Builder(inst, index)
        self.estimate = Estimator(inst, duals, params.pricing, index)
        self.rng = np.random.default_rng(params.seed)

    def fitness(self, legs: Legs) -> float:
        if not legs:
            return math.inf
        r = self.builder.route(legs)
        return self.estimate(r) if self.builder.usable(r) else math.inf

    def tournament(self, population: list[Legs], scores: list[float]) -> Legs:
        size = max(2, round(self.params.population_size * self.params.tournament_rate))
        picks = self.rng.integers(0, len(population), size=size)
        best = min(picks, key=lambda i: (scores[i], population[i]))
        return population[int(best)]

    def _cut(self, legs: Legs) -> tuple[int, int]:
        start = int(self.rng.integers(0, len(legs) + 1))
        length = int(self.rng.integers(0, min(self.params.max_segment, len(legs) - start) + 1))
        return start, length

    def crossover(self, a: Legs, b: Legs) -> tuple[Legs, Legs]:
        sa, la = self._cut(a)
        sb, lb = self._cut(b)
        seg_a, seg_b = a[sa:sa + la], b[sb:sb + lb]
        return a[:sa] + seg_b + a[sa + la:], b[:sb] + seg_a + b[sb + lb:]

    def mutate(self, legs: Legs) -> Legs:
        if self.rng.random() >= self.params.mutation_rate or len(legs) < 2:
            return legs
        p, q = (int(v) for v in self.rng.choice(len(legs), size=2, replace=False))
        out = list(legs)
        out[p], out[q] = out[q], out[p]
        return tuple(out)

    def local_search(self, a: Legs, b: Legs) -> tuple[Legs, Legs]:
        current = self.fitness(a) + self.fitness(b)
        while True:
            best = None
            for a2, b2 in swap_moves(a, b):
                value = self.fitness(a2) + self.fitness(b2)
                if value < current and (best is None or value < best[0]):
                    best = (value, a2, b2)
            if best is None:
                return a, b
            current, a, b = best


def ga_generate(z, duals: DualValues, params: GAParams, inst: Instance, *,
                index: ServiceIndex | None = None, trace: list | None = None) -> ColumnPool:
    base = routes_of(z)
    if not base:
        raise ValueError("the incumbent has no routes")
    search = _Search(inst, duals, params, index or ServiceIndex(inst))
    base_nodes = {r.nodes for r in base}
    population = sorted({r.legs for r in base})
    scores = [search.fitness(legs) for legs in population]
    found: dict[tuple[int, ...], tuple[float, Route]] = {}

    for gen in range(params.generations):
        children: dict[Legs, float] = {}
        for _ in range((params.population_size + 1) // 2):
            a = search.tournament(population, scores)
            b = search.tournament(population, scores)
            c1, c2 = search.crossover(a, b)
            c1, c2 = search.mutate(c1), search.mutate(c2)
            c1, c2 = search.local_search(c1, c2)
            for child in (c1, c2):
                f = search.fitness(child)
                if f < 0:
                    children[child] = f
                    r = search.builder.route(child)
                    if r.nodes not in base_nodes:
                        found[r.nodes] = (f, r)
        merged = dict(zip(population, scores))
        merged.update(children)
        ranked = sorted(merged.items(), key=lambda kv: (kv[1], kv[0]))[:params.population_size]
        population = [legs for legs, _ in ranked]
        scores = [f for _, f in ranked]
        if trace is not None:
            trace.append({"generation": gen, "best_fitness": scores[0] if scores else math.inf,
                          "pool_size": min(len(found), params.max_columns) + len(base)})
    return build_pool(found, base, params.max_columns)
