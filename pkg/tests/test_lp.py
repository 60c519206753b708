import math

import numpy as np
import pytest

from ftlcg.lp import (EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LinearModel, MIPConfig, model_to_mps, solve_lp,
                      solve_mip)

from lp_cases import (complementary_slackness_violation, dual_objective, exhaustive_cover_optimum, random_lp,
                      random_set_cover)


def test_single_bound_dual():
    m = LinearModel()
    x = m.add_variable("x", obj=1.0)
    m.add_constraint("c", {x: 1.0}, GE, 3.0)
    sol = solve_lp(m)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(3.0)
    assert sol.duals[0] == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    m = LinearModel()
    x = m.add_variable("x", ub=1.0)
    m.add_constraint("c", {x: 1.0}, GE, 2.0)
    assert solve_lp(m).status == INFEASIBLE
    u = LinearModel()
    y = u.add_variable("y", obj=-1.0)
    u.add_constraint("c", {y: 1.0}, GE, 0.0)
    assert solve_lp(u).status == UNBOUNDED


def test_model_rejects_bad_input():
    m = LinearModel()
    with pytest.raises(ValueError):
        m.add_variable("x", lb=2, ub=1)
    with pytest.raises(ValueError):
        m.add_constraint("c", {3: 1.0}, LE, 1.0)
    m.add_variable("x")
    with pytest.raises(ValueError):
        m.add_constraint("c", {0: 1.0}, "<", 1.0)


def _vertex_oracle(model):
    """Best objective over basic solutions of a small LP with explicit bounds."""
    n = model.num_vars
    A = model.matrix().toarray()
    lb, ub = model.bounds()
    rows = [(A[i], c.rhs) for i, c in enumerate(model.constraints)]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append((e, lb[j]))
        if math.isfinite(ub[j]):
            rows.append((e, ub[j]))
    import itertools
    best = math.inf
    for pick in itertools.combinations(range(len(rows)), n):
        M = np.array([rows[p][0] for p in pick])
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, np.array([rows[p][1] for p in pick]))
        if model.max_violation(x) <= 1e-7:
            best = min(best, float(model.objective() @ x))
    return best


@pytest.mark.parametrize("seed", range(10))
def test_matches_vertex_enumeration(seed):
    model = random_lp(np.random.default_rng(seed), 4, 3)
    sol = solve_lp(model)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(_vertex_oracle(model), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_native_agrees_with_highs(seed):
    model = random_lp(np.random.default_rng(100 + seed), 8, 6)
    a, b = solve_lp(model, "native"), solve_lp(model, "highs")
    assert a.status == b.status == OPTIMAL
    assert a.objective == pytest.approx(b.objective, rel=1e-9, abs=1e-9)
    for sol in (a, b):
        assert dual_objective(model, sol) == pytest.approx(sol.objective, rel=1e-9, abs=1e-9)
        assert complementary_slackness_violation(model, sol) <= 1e-7


def test_equality_rows_and_free_duals():
    m = LinearModel()
    x, y = m.add_variable("x", obj=2.0), m.add_variable("y", obj=3.0)
    m.add_constraint("sum", {x: 1.0, y: 1.0}, EQ, 4.0)
    m.add_constraint("lim", {x: 1.0}, LE, 1.0)
    sol = solve_lp(m)
    assert sol.objective == pytest.approx(11.0)
    assert sol.duals == pytest.approx([3.0, -1.0])


def test_mip_root_that_is_integral_needs_one_node():
    m = LinearModel()
    x = m.add_variable("x", ub=5, obj=1.0, integer=True)
    m.add_constraint("c", {x: 1.0}, GE, 2.0)
    sol = solve_mip(m)
    assert sol.status == OPTIMAL and sol.x[0] == pytest.approx(2.0) and sol.nodes == 1


def test_mip_branches_on_fractional_root():
    m = LinearModel()
    x, y = m.add_variable("x", ub=1, obj=-5, integer=True), m.add_variable("y", ub=1, obj=-4, integer=True)
    m.add_constraint("w", {x: 6.0, y: 4.0}, LE, 9.0)
    sol = solve_mip(m)
    assert sol.objective == pytest.approx(-5.0)
    assert sol.nodes > 1


def test_mip_infeasible():
    m = LinearModel()
    x = m.add_variable("x", ub=1, integer=True)
    m.add_constraint("c", {x: 2.0}, EQ, 1.0)
    assert solve_mip(m).status == INFEASIBLE


@pytest.mark.parametrize("seed", range(10))
def test_set_cover_matches_exhaustive(seed):
    rng = np.random.default_rng(seed)
    model, sets, costs = random_set_cover(rng, 7, 10)
    for backend in ("native", "highs"):
        sol = solve_mip(model, MIPConfig(), backend)
        assert sol.objective == exhaustive_cover_optimum(sets, costs, 7)


def test_mps_dump():
    m = LinearModel("toy")
    x = m.add_variable("x", ub=4, obj=1.5, integer=True)
    y = m.add_variable("y free", lb=-math.inf, obj=-1)
    m.add_constraint("row a", {x: 1.0, y: 2.0}, GE, 1.0)
    m.add_constraint("b", {y: 1.0}, LE, 3.0)
    text = model_to_mps(m)
    assert text.startswith("NAME")
    assert text.rstrip().endswith("ENDATA")
    for token in (" G  row_a", " L  b", "'INTORG'", "'INTEND'", "UP bnd x 4", "y_free"):
        assert token in text
