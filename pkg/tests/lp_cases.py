"""Random LP and set-cover cases with independent checks."""

import numpy as np

from ftlcg.lp import EQ, GE, LE, LinearModel


def random_lp(rng: np.random.Generator, n: int, m: int) -> LinearModel:
    """Feasible by construction (rows built around a known point); bounded by box bounds."""
    x0 = rng.uniform(0, 5, n)
    model = LinearModel("rand")
    for j in range(n):
        ub = float(rng.choice([np.inf, 10.0])) if j else 10.0
        model.add_variable(f"x{j}", 0.0, ub, float(rng.integers(-5, 6)))
    for i in range(m):
        a = rng.integers(-4, 5, n).astype(float)
        a[rng.random(n) < 0.3] = 0.0
        act = float(a @ x0)
        sense = rng.choice([LE, GE, EQ], p=[0.45, 0.45, 0.1])
        slack = float(rng.uniform(0, 3))
        rhs = act + slack if sense == LE else act - slack if sense == GE else act
        model.add_constraint(f"r{i}", {j: a[j] for j in range(n)}, str(sense), rhs)
    # total-sum cap keeps the variables without an upper bound finite
    model.add_constraint("cap", {j: 1.0 for j in range(n)}, LE, float(x0.sum() + 20))
    return model


def dual_objective(model: LinearModel, sol, tol: float = 1e-9) -> float:
    rc = sol.reduced_costs(model)
    rc[np.abs(rc) <= tol] = 0.0
    lb, ub = model.bounds()
    value = float(model.rhs() @ sol.duals)
    for r, lo, hi in zip(rc, lb, ub):
        if r > 0:
            value += r * lo
        elif r < 0:
            value += r * hi
    return value


def complementary_slackness_violation(model: LinearModel, sol, tol: float = 1e-7) -> float:
    """Largest breach of dual sign, row complementarity or bound complementarity."""
    worst = 0.0
    act = model.row_activity(sol.x)
    for y, a, con in zip(sol.duals, act, model.constraints):
        if con.sense == GE:
            worst = max(worst, -y)
        elif con.sense == LE:
            worst = max(worst, y)
        if con.sense != EQ:
            worst = max(worst, abs(y) * abs(a - con.rhs))
    rc = sol.reduced_costs(model)
    lb, ub = model.bounds()
    for r, x, lo, hi in zip(rc, sol.x, lb, ub):
        if r > tol:
            worst = max(worst, r * (x - lo))
        elif r < -tol:
            worst = max(worst, -r * (hi - x) if np.isfinite(hi) else np.inf)
    return worst


def random_set_cover(rng: np.random.Generator, elements: int, columns: int):
    sets = []
    for _ in range(columns):
        size = int(rng.integers(1, max(2, elements // 2) + 1))
        sets.append(frozenset(rng.choice(elements, size=size, replace=False).tolist()))
    for e in range(elements):  # every element coverable
        if not any(e in s for s in sets):
            j = int(rng.integers(columns))
            sets[j] = sets[j] | {e}
    costs = rng.integers(1, 20, columns).tolist()
    model = LinearModel("cover")
    for j, c in enumerate(costs):
        model.add_variable(f"z{j}", 0.0, 1.0, float(c), integer=True)
    for e in range(elements):
        model.add_constraint(f"e{e}", {j: 1.0 for j, s in enumerate(sets) if e in s}, GE, 1.0)
    return model, sets, costs


def exhaustive_cover_optimum(sets, costs, elements: int) -> int:
    """Minimum cost over all 2^n column subsets (subset tables built by lowest set bit)."""
    n = len(sets)
    bits = [sum(1 << e for e in s) for s in sets]
    full = (1 << elements) - 1
    cover = [0] * (1 << n)
    cost = [0] * (1 << n)
    best = None
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        cover[mask] = cover[rest] | bits[low]
        cost[mask] = cost[rest] + costs[low]
        if cover[mask] == full and (best is None or cost[mask] < best):
            best = cost[mask]
    return best
