import dataclasses
from collections import Counter

import numpy as np
import pytest

from ftlcg.instance import GeneratorConfig, generate_instance, with_commodities
from ftlcg.lp import solve_lp
from ftlcg.master import DualValues, build_rmp, extract_duals
from ftlcg.pricing import (
    P1, P2, Estimator, best_assignment, iter_assignments, price_by_enumeration, price_by_estimate,
    price_random_ablation, reduced_cost_avg, reduced_cost_exact, reduced_cost_shift_avg, reduced_cost_weighted,
)
from ftlcg.routing import ServiceIndex, enumerate_routes


def test_hand_computed_estimates(inst, routes):
    pi = {"k1": 100.0, "k2": 20.0}
    assert reduced_cost_avg(routes[2], pi, inst) == 4.0
    assert reduced_cost_weighted(routes[2], pi, inst) == 4.0
    heavy = with_commodities(inst, [dataclasses.replace(k, quantity=3) if k.id == "k1" else k
                                    for k in inst.commodities])
    assert reduced_cost_weighted(routes[2], pi, heavy) == -16.0
    assert reduced_cost_avg(routes[2], pi, heavy) == 4.0
    flat = {k.id: 79.0 for k in inst.commodities}
    assert reduced_cost_avg(routes[0], flat, inst) == -79.0


def test_zero_duals_price_at_distance(inst, routes):
    zero = DualValues()
    for r in routes:
        assert reduced_cost_avg(r, zero, inst) == r.distance
        assert best_assignment(r, zero, 0, inst)[1] == r.distance


def _uniform(inst, q):
    return with_commodities(inst, [dataclasses.replace(k, quantity=q) for k in inst.commodities])


@pytest.mark.parametrize("seed", range(10))
def test_weighted_equals_plain_under_uniform_quantities(seed):
    rng = np.random.default_rng(seed)
    inst = _uniform(generate_instance(GeneratorConfig(node_count=5, shift_count=2, seed=seed)),
                    int(rng.integers(1, 6)))
    pi = {k.id: float(rng.normal(30, 20)) for k in inst.commodities}
    index = ServiceIndex(inst)
    for r in enumerate_routes(inst, max_legs=2):
        assert reduced_cost_avg(r, pi, inst, index) == reduced_cost_weighted(r, pi, inst, index)


def test_estimate_monotone_in_prices(inst):
    rng = np.random.default_rng(0)
    routes = enumerate_routes(inst)
    index = ServiceIndex(inst)
    for _ in range(30):
        pi = {k.id: float(rng.uniform(0, 100)) for k in inst.commodities}
        bumped = dict(pi)
        bumped[str(rng.choice(list(pi)))] += float(rng.uniform(0, 50))
        for r in routes:
            for f in (reduced_cost_avg, reduced_cost_weighted):
                assert f(r, bumped, inst, index) <= f(r, pi, inst, index) + 1e-12


def _random_duals(rng, inst, routes, index):
    duals = DualValues(alpha={s: float(rng.uniform(0, 20)) for s in range(inst.shifts.count)},
                       pi={k.id: float(rng.uniform(0, 120)) for k in inst.commodities})
    for r in routes:
        for s in range(inst.shifts.count):
            for j, ks in index.delta(r, s).items():
                duals.beta[r.nodes, j, s] = float(rng.uniform(0, 10))
                for k in ks:
                    duals.gamma[r.nodes, j, k.id, s] = float(rng.uniform(0, 10))
    return duals


@pytest.mark.parametrize("seed", range(5))
def test_best_assignment_matches_brute_force(seed):
    inst = generate_instance(GeneratorConfig(node_count=4, shift_count=2, commodity_count=(5, 7), units=(8, 12),
                                             seed=seed))
    index = ServiceIndex(inst)
    routes = enumerate_routes(inst, max_legs=3)
    duals = _random_duals(np.random.default_rng(seed), inst, routes, index)
    for r in routes:
        for s in range(inst.shifts.count):
            if not index.table(r):
                continue
            brute = min(reduced_cost_exact(r, a, duals, s, inst, index) for a in iter_assignments(r, s, inst, index))
            assert best_assignment(r, duals, s, inst, index)[1] == pytest.approx(brute, abs=1e-9)


def test_exact_reduced_cost_matches_model_columns(inst, routes):
    """Composite reduced cost equals the summed LP reduced costs of its y and x columns."""
    mm = build_rmp(routes, inst, materialize_links=True)
    lp = solve_lp(mm.model)
    duals = extract_duals(lp, mm)
    rc = lp.reduced_costs(mm.model)
    for r in routes:
        for a in iter_assignments(r, 0, inst):
            expected = rc[mm.y[r.nodes, 0]] + sum(rc[mm.x[r.nodes, j, cid, 0]] for j, cid in a.items() if cid)
            assert reduced_cost_exact(r, a, duals, 0, inst) == pytest.approx(expected, abs=1e-9)
            assert expected >= -1e-9  # LP optimality over the pool


def test_exact_rejects_bad_assignments(inst, routes):
    with pytest.raises(ValueError):
        reduced_cost_exact(routes[0], {1: "v1"}, DualValues(), 0, inst)
    with pytest.raises(ValueError):
        reduced_cost_exact(routes[0], {2: "k1"}, DualValues(), 0, inst)


def test_shift_average_single_shift(inst, routes):
    duals = DualValues.from_pi({"k1": 50.0, "k2": 10.0})
    assert reduced_cost_shift_avg(routes[2], duals, inst) == best_assignment(routes[2], duals, 0, inst)[1]


def test_enumeration_pricing_returns_most_negative(inst):
    routes = enumerate_routes(inst)
    duals = DualValues.from_pi({k.id: 79.0 for k in inst.commodities})
    cols = price_by_enumeration(routes, duals, 3, inst)
    values = [c.value for c in cols]
    assert values == sorted(values) and all(v < 0 for v in values)
    every = [c.value for c in price_by_enumeration(routes, duals, 10_000, inst)]
    assert values == sorted(every)[:3]


def test_enumeration_pricing_certifies_optimality(inst, routes):
    mm = build_rmp(routes, inst, fleet_active=False)
    duals = extract_duals(solve_lp(mm.model), mm)
    assert price_by_enumeration(routes, duals, 100, inst) == []


def test_estimate_pricing_filters_and_excludes(inst, routes):
    est = Estimator(inst, DualValues.from_pi({k.id: 200.0 for k in inst.commodities}), P1)
    picked = price_by_estimate(routes, est, 10)
    assert len(picked) == 4
    assert picked == sorted(picked, key=lambda rv: (rv[1], rv[0].nodes))
    assert routes[0] not in [r for r, _ in price_by_estimate(routes, est, 10, exclude=[routes[0]])]
    assert len(price_by_estimate(routes, est, 2)) == 2
    est(routes[0])
    assert est.evaluations == 4
    with pytest.raises(ValueError):
        Estimator(inst, DualValues(), "enum")


def test_random_ablation_is_seeded_and_uniform(inst):
    routes = enumerate_routes(inst)
    a = price_random_ablation(routes, np.random.default_rng(7), 5)
    b = price_random_ablation(routes, np.random.default_rng(7), 5)
    assert a == b and len(set(r.nodes for r in a)) == 5
    assert price_random_ablation(routes[:3], np.random.default_rng(0), 5) == routes[:3]
    rng = np.random.default_rng(1)
    counts = Counter(r.nodes for _ in range(4000) for r in price_random_ablation(routes, rng, 1))
    expected = 4000 / len(routes)
    assert len(counts) == len(routes)
    assert max(abs(c - expected) for c in counts.values()) < 6 * expected ** 0.5
