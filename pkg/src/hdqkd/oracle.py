"""Brute-force entropy maximization over Bell coefficients.

This is the independent check on the analytic optimum: it only knows the
linear error-rate constraints on the d**2 coefficients and maximizes the
Shannon entropy numerically. No assumption is made about which coefficients
end up equal.

The solver finds a strictly feasible start by linear programming, then runs
Newton ascent restricted to the affine constraint set (the Newton direction
is the gradient projected in the metric of the entropy Hessian) with a
positivity-preserving backtracking line search.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .bell import BellDiagonalState, von_neumann_entropy
from .exceptions import ConvergenceError, InfeasibleRatesError


@dataclass(frozen=True)
class ConstrainedProblem:
    """Maximize H(lambda) given Q_Z and Q_XZ^k for k = 0..m-2."""

    d: int
    m: int
    rates: tuple
    tol: float = 1e-10
    max_iter: int = 500

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(q) for q in self.rates))
        if len(self.rates) != self.m:
            raise ValueError(f"expected {self.m} rates, got {len(self.rates)}")
        if not 2 <= self.m <= self.d + 1:
            raise ValueError(f"basis count m={self.m} outside [2, {self.d + 1}]")

    def index_sets(self):
        """Coefficients (alpha, beta) entering each error rate, in rate order."""
        d = self.d
        sets = [[(0, a) for a in range(d)]]
        sets += [[(a, (k * a) % d) for a in range(d)] for k in range(self.m - 1)]
        return sets

    def constraints(self):
        """Equality system A lam = b on the flattened grid (index alpha * d + beta).

        Rows are the error-rate sums followed by normalization.
        """
        d = self.d
        rows = []
        for s in self.index_sets():
            row = np.zeros(d * d)
            for a, b in s:
                row[a * d + b] = 1.0
            rows.append(row)
        rows.append(np.ones(d * d))
        b = np.array([1.0 - q for q in self.rates] + [1.0])
        return np.array(rows), b


@dataclass(frozen=True)
class OracleResult:
    state: BellDiagonalState
    iterations: int
    stationarity: float
    constraint_residual: float


def _lp(c, A, b, bounds, A_ub=None, b_ub=None):
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A, b_eq=b, bounds=bounds, method="highs")
    return res


def _interior_point(A, b, support):
    """Point maximizing the smallest coordinate on ``support`` (others fixed at 0)."""
    n = A.shape[1]
    idx = np.flatnonzero(support)
    k = idx.size
    # variables: lam[idx], t ; maximize t with lam_j >= t
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_eq = np.hstack([A[:, idx], np.zeros((A.shape[0], 1))])
    A_ub = np.hstack([-np.eye(k), np.ones((k, 1))])
    res = _lp(c, A_eq, b, [(0, None)] * k + [(0, 1.0 / max(k, 1))], A_ub, np.zeros(k))
    if res.status == 2:
        raise InfeasibleRatesError("error-rate constraints admit no Bell-diagonal state")
    if res.status != 0:
        raise ConvergenceError(f"feasibility LP failed: {res.message}")
    x = np.zeros(n)
    x[idx] = res.x[:-1]
    return x, float(res.x[-1])


def _forced_zero_support(A, b):
    n = A.shape[1]
    support = np.ones(n, dtype=bool)
    for j in range(n):
        c = np.zeros(n)
        c[j] = -1.0
        res = _lp(c, A, b, [(0, None)] * n)
        if res.status == 0 and -res.fun <= 1e-13:
            support[j] = False
    return support


def feasible_start(problem):
    """Strictly positive feasible point on the largest possible support.

    Returns (lam, support). Coordinates that every feasible point sets to zero
    are excluded from the support.
    """
    A, b = problem.constraints()
    support = np.ones(A.shape[1], dtype=bool)
    x, t = _interior_point(A, b, support)
    if t <= 1e-12:
        support = _forced_zero_support(A, b)
        x, t = _interior_point(A, b, support)
    return x, support


def _null_projector(A):
    # orthogonal projector onto {z : A z = 0}
    return np.eye(A.shape[1]) - np.linalg.pinv(A) @ A


def random_feasible_point(problem, rng):
    """Random strictly feasible point for restart tests."""
    A, _ = problem.constraints()
    x0, support = feasible_start(problem)
    idx = np.flatnonzero(support)
    P = _null_projector(A[:, idx])
    z = P @ rng.standard_normal(idx.size)
    neg = z < 0
    scale = 1.0
    if neg.any():
        scale = 0.9 * np.min(x0[idx][neg] / -z[neg])
    x = np.zeros_like(x0)
    x[idx] = x0[idx] + rng.uniform(0.1, 1.0) * scale * z
    return x


def _entropy_nats(x):
    return -np.sum(x * np.log(x))


def solve(problem, start=None):
    """Run the constrained maximization and return the optimum with diagnostics."""
    A, b = problem.constraints()
    x_full, support = feasible_start(problem)
    if start is not None:
        start = np.asarray(start, dtype=float).reshape(-1)
        if np.any(start[support] <= 0) or np.any(start[~support] != 0):
            raise ValueError("start point must be positive exactly on the feasible support")
        x_full = start
    idx = np.flatnonzero(support)
    As = A[:, idx]
    x = x_full[idx].copy()
    pinv = np.linalg.pinv(As)

    it = 0
    for it in range(1, problem.max_iter + 1):
        # pull back onto the affine set; the correction is at rounding level
        x = x + pinv @ (b - As @ x)
        g = -(np.log(x) + 1.0)
        hinv = x  # inverse of the (negated) diagonal Hessian
        # Newton step: dx = Hinv (g - A^T w) with A dx = 0
        M = As @ (hinv[:, None] * As.T)
        w = np.linalg.lstsq(M, As @ (hinv * g), rcond=None)[0]
        dx = hinv * (g - As.T @ w)
        decrement = float(dx @ (dx / hinv))
        if decrement < problem.tol**2:
            break
        neg = dx < 0
        step = 1.0
        if neg.any():
            step = min(1.0, 0.99 * float(np.min(-x[neg] / dx[neg])))
        f0 = _entropy_nats(x)
        slope = float(g @ dx)
        while step > 1e-16:
            trial = x + step * dx
            if np.all(trial > 0) and _entropy_nats(trial) >= f0 + 0.25 * step * slope:
                break
            step *= 0.5
        else:
            break
        x = trial
    else:
        raise ConvergenceError(f"no convergence within {problem.max_iter} Newton iterations")

    x = np.clip(x + pinv @ (b - As @ x), 0.0, None)
    lam = np.zeros(A.shape[1])
    lam[idx] = x
    g = -(np.log(x) + 1.0)
    stationarity = float(np.max(np.abs(g - As.T @ (np.linalg.pinv(As.T) @ g))))
    residual = float(np.max(np.abs(A @ lam - b)))
    lam /= lam.sum()
    return OracleResult(
        BellDiagonalState(problem.d, lam.reshape(problem.d, problem.d)), it, stationarity, residual
    )


def max_entropy_lambda(problem, start=None):
    """Entropy-maximizing Bell coefficients satisfying the error-rate constraints."""
    return solve(problem, start).state


def oracle_rate(problem, start=None):
    """log2 d minus the largest Bell-coefficient entropy compatible with the rates."""
    return float(np.log2(problem.d) - von_neumann_entropy(max_entropy_lambda(problem, start)))
