"""Dense two-phase primal simplex with bounded variables.

Every row gets an artificial column so the inverse basis is always available
from the tableau; duals are recomputed from the final basis with a direct
solve. Dantzig pricing, switching to Bland's rule after a run of degenerate
pivots.
"""

from __future__ import annotations

import math

import numpy as np

from .model import EQ, GE, INFEASIBLE, ITERATION_LIMIT, LE, OPTIMAL, TOL, UNBOUNDED, LinearModel, LPSolution


class _Tableau:
    def __init__(self, M: np.ndarray, rhs: np.ndarray, U: np.ndarray, n_real: int):
        m, n = M.shape
        self.m = m
        self.n_real = n_real  # structural + slack columns
        self.T = np.hstack([M, np.eye(m)])
        self.U = np.concatenate([U, np.full(m, math.inf)])
        self.beta = rhs.astype(float).copy()
        self.basis = np.arange(n, n + m)
        self.is_basic = np.zeros(n + m, dtype=bool)
        self.is_basic[self.basis] = True
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        old = self.basis[r]
        self.is_basic[old] = False
        self.basis[r] = j
        self.is_basic[j] = True

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int, tol: float, bland_after: int) -> str:
        T, U = self.T, self.U
        streak = 0
        bland = False
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            d = cost - cost[self.basis] @ T
            free = ~self.is_basic & allowed
            elig = free & ((~self.at_upper & (d < -tol) & (U > tol)) | (self.at_upper & (d > tol)))
            if not elig.any():
                return OPTIMAL
            if bland:
                j = int(np.flatnonzero(elig)[0])
            else:
                j = int(np.argmax(np.where(elig, np.abs(d), -1.0)))
            direction = -1.0 if self.at_upper[j] else 1.0
            alpha = direction * T[:, j]

            theta = U[j]
            leave, leave_upper = -1, False
            best_alpha = 0.0
            for r in range(self.m):
                a = alpha[r]
                if a > tol:
                    ratio, to_upper = max(self.beta[r], 0.0) / a, False
                elif a < -tol and math.isfinite(U[self.basis[r]]):
                    ratio, to_upper = max(U[self.basis[r]] - self.beta[r], 0.0) / -a, True
                else:
                    continue
                if ratio < theta - tol:
                    better = True
                elif ratio <= theta + tol and leave >= 0:
                    if bland:
                        better = self.basis[r] < self.basis[leave]
                    else:
                        better = abs(a) > best_alpha
                else:
                    better = False
                if better:
                    theta, leave, leave_upper, best_alpha = min(ratio, theta), r, to_upper, abs(a)
            if not math.isfinite(theta):
                return UNBOUNDED

            self.beta -= theta * alpha
            if leave < 0:
                self.at_upper[j] = not self.at_upper[j]
            else:
                value = U[j] - theta if self.at_upper[j] else theta
                old = self.basis[leave]
                self.pivot(leave, j)
                self.at_upper[old] = leave_upper
                self.at_upper[j] = False
                self.beta[leave] = value
            self.iterations += 1
            if theta <= tol:
                streak += 1
                if streak >= bland_after:
                    bland = True
            else:
                streak = 0
                bland = False

    def values(self) -> np.ndarray:
        x = np.where(self.at_upper, self.U, 0.0)
        x[self.basis] = self.beta
        return x


def solve_arrays(c, A, senses, b, lb, ub, *, max_iter: int = 100_000, tol: float = TOL,
                 bland_after: int = 20) -> tuple[str, np.ndarray, np.ndarray, float, int]:
    """Solve ``min c.x`` subject to ``A x (senses) b`` and ``lb <= x <= ub``.

    Returns (status, x, duals, objective, iterations). Duals follow the usual
    minimisation convention: non-positive on ``<=`` rows, non-negative on
    ``>=`` rows, so that ``c - A^T y`` are the reduced costs.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(len(b), len(c))
    b = np.asarray(b, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    m, n = A.shape

    # x_j = offset + sign * x'_col with x'_col in [0, U]
    owner, sign, Ucol = [], [], []
    offset = np.zeros(n)
    for j in range(n):
        if math.isfinite(lb[j]):
            offset[j] = lb[j]
            owner.append(j), sign.append(1.0), Ucol.append(ub[j] - lb[j])
        elif math.isfinite(ub[j]):
            offset[j] = ub[j]
            owner.append(j), sign.append(-1.0), Ucol.append(math.inf)
        else:
            owner += [j, j]
            sign += [1.0, -1.0]
            Ucol += [math.inf, math.inf]
    owner = np.array(owner, dtype=int)
    sign = np.array(sign)
    Acols = A[:, owner] * sign
    ccols = c[owner] * sign
    rhs = b - A @ offset

    slack_sign = [1.0 if s == LE else -1.0 for s in senses if s != EQ]
    slack_rows = [i for i, s in enumerate(senses) if s != EQ]
    S = np.zeros((m, len(slack_rows)))
    for col, (i, sg) in enumerate(zip(slack_rows, slack_sign)):
        S[i, col] = sg
    M = np.hstack([Acols, S])
    n_real = M.shape[1]
    flip = np.where(rhs < 0, -1.0, 1.0)
    M = M * flip[:, None]
    rhs = rhs * flip
    U = np.concatenate([np.array(Ucol, dtype=float), np.full(len(slack_rows), math.inf)])

    tab = _Tableau(M, rhs, U, n_real)
    total = n_real + m
    art = np.arange(n_real, total)

    phase1 = np.zeros(total)
    phase1[art] = 1.0
    status = tab.run(phase1, np.ones(total, dtype=bool), max_iter, tol, bland_after)
    if status == ITERATION_LIMIT:
        return _finish(ITERATION_LIMIT, tab, M, rhs, None, owner, sign, offset, c, flip, n)
    infeas = float(tab.values()[art].sum())
    if infeas > 1e-7 * max(1.0, float(np.abs(rhs).max(initial=0.0))):
        return _finish(INFEASIBLE, tab, M, rhs, None, owner, sign, offset, c, flip, n)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= n_real:
            row = np.abs(tab.T[r, :n_real]) * ~tab.is_basic[:n_real]
            j = int(np.argmax(row)) if n_real else 0
            if n_real and row[j] > 1e-7:
                value = tab.values()[j]
                tab.pivot(r, j)
                tab.at_upper[j] = False
                tab.beta[r] = value
    tab.U[art] = 0.0
    allowed = np.ones(total, dtype=bool)
    allowed[art] = False
    phase2 = np.zeros(total)
    phase2[:len(ccols)] = ccols
    status = tab.run(phase2, allowed, max_iter, tol, bland_after)
    return _finish(status, tab, M, rhs, phase2, owner, sign, offset, c, flip, n)


def _finish(status, tab, M, rhs, cost, owner, sign, offset, c, flip, n):
    m = tab.m
    full = np.hstack([M, np.eye(m)])
    xs = tab.values()
    duals = np.zeros(m)
    if status == OPTIMAL and m:
        B = full[:, tab.basis]
        nonbasic = ~tab.is_basic
        try:
            xb = np.linalg.solve(B, rhs - full[:, nonbasic] @ xs[nonbasic])
            xs[tab.basis] = xb
            duals = flip * np.linalg.solve(B.T, cost[tab.basis])
        except np.linalg.LinAlgError:
            duals = flip * (cost[tab.basis] @ tab.T[:, tab.n_real:])
    x = offset.copy()
    np.add.at(x, owner, sign * xs[:len(owner)])
    if status == UNBOUNDED:
        obj = -math.inf
    elif status == INFEASIBLE:
        obj = math.inf
    else:
        obj = float(c @ x)
    return status, x, duals, obj, tab.iterations


def solve_lp_native(model: LinearModel, *, lb=None, ub=None, max_iter: int = 100_000) -> LPSolution:
    mlb, mub = model.bounds()
    lb = mlb if lb is None else lb
    ub = mub if ub is None else ub
    A = model.matrix().toarray()
    status, x, duals, obj, its = solve_arrays(model.objective(), A, model.senses(), model.rhs(), lb, ub,
                                              max_iter=max_iter)
    return LPSolution(status, x, duals, obj, bound=obj if status == OPTIMAL else math.nan,
                      iterations=its, backend="native")
