"""Asymptotic (Devetak-Winter) key rates for m measured MUBs.

Rates are in bits per sifted symbol and are returned unclamped: a negative
value means no key can be distilled, and threshold searches rely on the sign.

Rate vectors are ordered ``(Q_Z, Q_X, Q_XZ, ..., Q_XZ^(m-2))``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .bell import BellDiagonalState
from .exceptions import (
    InfeasibleRatesError,
    InvalidDimensionError,
    NoFeasibleRootError,
    UnsupportedRegimeError,
)
from .weyl import is_prime, is_prime_power

# negative gaps down to this size are rounding noise, not infeasibility
_GAP_TOL = 1e-14
_SCAN_POINTS = 2048


def shannon_binary(p):
    """Binary entropy h(p) in bits; h(0) = h(1) = 0. Accepts scalars or arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError(f"probability outside [0, 1]: {p}")
    out = np.zeros_like(arr)
    inner = (arr > 0) & (arr < 1)
    x = arr[inner]
    out[inner] = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return float(out) if out.ndim == 0 else out


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def rate_two_mubs(d, qx, qz):
    """Two-basis rate log2 d - h(Q_X) - h(Q_Z) - (Q_X + Q_Z) log2(d - 1)."""
    return float(
        np.log2(d) - shannon_binary(qx) - shannon_binary(qz) - (qx + qz) * np.log2(d - 1)
    )


def rate_max_mubs(d, rates):
    """Closed-form rate for a complete set of d + 1 bases."""
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (d + 1,):
        raise ValueError(f"expected d + 1 = {d + 1} error rates, got {rates.size}")
    q = rates.sum() / d
    gaps = q - rates
    if gaps.min() < -_GAP_TOL or q > 1:
        raise InfeasibleRatesError(f"no Bell-diagonal state has error rates {rates.tolist()}")
    gaps = np.clip(gaps, 0.0, None)
    return float(
        np.log2(d) + _xlog2x(1 - q) - q * np.log2(d - 1) + _xlog2x(gaps).sum()
    )


def rate_max_mubs_symmetric(d, Q):
    """Rate for d + 1 bases with equal error Q: log2 d - h(q) - q log2(d^2 - 1), q = (d+1)Q/d."""
    if not 0 <= Q <= d / (d + 1):
        raise ValueError(f"symmetric error {Q} outside [0, d/(d+1)]")
    q = min((d + 1) * Q / d, 1.0)
    return float(np.log2(d) - shannon_binary(q) - q * np.log2(d * d - 1))


@dataclass(frozen=True)
class AsymptoticSolution:
    """Entropy-maximizing Bell coefficients and the resulting key rate.

    ``lambda_z`` is the common value of lambda[0, a], ``lambda_k[i]`` that of
    lambda[a, i a] and ``eta`` that of every coefficient no error rate
    constrains (a != 0). For m = d + 1 there are no such coefficients and
    ``eta`` is reported as 0.
    """

    d: int
    m: int
    q: float
    v: float
    eta: float
    lambda00: float
    lambda_z: float
    lambda_k: tuple
    rate: float

    @property
    def n_eta(self):
        return (self.d - 1) * (self.d - self.m + 1)

    def normalization(self):
        d = self.d
        return (
            self.lambda00
            + (d - 1) * self.lambda_z
            + (d - 1) * sum(self.lambda_k)
            + self.n_eta * self.eta
        )

    def bell_state(self):
        """Full lambda grid; only defined when the constrained index sets are disjoint."""
        d, m = self.d, self.m
        if m > 3 and not is_prime(d):
            raise UnsupportedRegimeError("index sets overlap for composite d with m > 3")
        lam = np.full((d, d), self.eta if m < d + 1 else 0.0)
        lam[0, 0] = self.lambda00
        lam[0, 1:] = self.lambda_z
        a = np.arange(1, d)
        for k, lk in enumerate(self.lambda_k):
            lam[a, (k * a) % d] = lk
        return BellDiagonalState(d, lam)


def check_regime(d, m, allow_nonprime=False):
    """Validate (d, m); composite d beyond three bases needs an explicit opt-in."""
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    if not 2 <= m <= d + 1:
        raise ValueError(f"basis count m={m} outside [2, {d + 1}]")
    if m <= 3 or is_prime(d) or allow_nonprime:
        return
    if m == d + 1 and is_prime_power(d):
        return
    raise UnsupportedRegimeError(
        f"d={d} is not prime: only 3 mutually unbiased Weyl bases are guaranteed; "
        f"pass allow_nonprime=True to evaluate m={m} anyway"
    )


def _prepare(d, m, rates):
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (m,):
        raise ValueError(f"expected {m} error rates, got {rates.size}")
    if np.any((rates < 0) | (rates > 1)):
        raise ValueError(f"error rates must lie in [0, 1]: {rates.tolist()}")
    q = rates.sum() / (m - 1)
    gaps = q - rates
    if gaps.min() < -_GAP_TOL or q > 1 + _GAP_TOL:
        raise InfeasibleRatesError(f"no Bell-diagonal state has error rates {rates.tolist()}")
    return rates, min(q, 1.0), np.clip(gaps, 0.0, None)


def eta_polynomial_residual(d, m, rates, eta):
    """(d-1)^m (1 - q + v eta) eta^(m-1) - prod_i (q - Q_i - v eta)."""
    rates = np.asarray(rates, dtype=float)
    q = rates.sum() / (m - 1)
    v = (d - 1) * (d - m + 1) / (m - 1)
    return (d - 1) ** m * (1 - q + v * eta) * eta ** (m - 1) - np.prod(q - rates - v * eta)


def _log_residual(log_eta, d, m, q, v, gaps):
    # log of LHS / RHS of the eta condition; strictly increasing on (0, eta_max)
    log_eta = np.asarray(log_eta, dtype=float)
    eta = np.exp(log_eta)
    rest = gaps - v * eta[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            m * np.log(d - 1)
            + np.log1p(-q + v * eta)
            + (m - 1) * log_eta
            - np.sum(np.log(np.where(rest > 0, rest, 0.0)), axis=-1)
        )


def _rate_from_eta(d, m, q, v, eta, rates, gaps):
    rest = gaps - v * eta
    if eta > 0 and rest.min() > 0 and q < 1:
        return float(
            np.log2(d / (d - 1))
            - (m - 1) * (1 - q) * np.log2(eta * (d - 1))
            + np.sum((1 - rates) * np.log2(rest))
        )
    # boundary solutions: evaluate the entropy directly with 0 log 0 = 0
    n_eta = (d - 1) * (d - m + 1)
    lam_i = np.clip(rest, 0.0, None) / (d - 1)
    return float(
        np.log2(d)
        + _xlog2x(1 - q + v * eta)
        + (d - 1) * _xlog2x(lam_i).sum()
        + n_eta * _xlog2x(eta)
    )


def _find_eta_roots(d, m, q, v, gaps):
    eta_max = gaps.min() / v
    log_hi = np.log(eta_max) + np.log1p(-1e-15)
    # geometric samples reach tiny roots, linear ones resolve the upper end
    frac = np.concatenate([
        np.geomspace(1e-300, 1.0, _SCAN_POINTS // 2, endpoint=False),
        np.linspace(0.0, 1.0, _SCAN_POINTS // 2 + 1)[1:-1],
    ])
    t = np.unique(np.concatenate([np.log(eta_max) + np.log(frac), [log_hi]]))
    t = t[t <= log_hi]
    vals = _log_residual(t, d, m, q, v, gaps)
    roots = [float(np.exp(x)) for x in t[vals == 0]]
    if vals[0] > 0:
        roots.append(0.0)
    if vals[-1] < 0:
        roots.append(float(eta_max))
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        r = brentq(lambda x: float(_log_residual(x, d, m, q, v, gaps)), t[i], t[i + 1],
                   xtol=1e-15, rtol=4 * np.finfo(float).eps)
        roots.append(float(np.exp(r)))
    return roots


def solve_eta(d, m, rates, allow_nonprime=False):
    """Entropy-maximizing Bell coefficients compatible with the observed error rates.

    For m < d + 1 the free coefficient eta is the root of the degree-m
    condition inside the interval where every reconstructed coefficient
    stays nonnegative. All roots found by a sign-change scan are kept and the
    one giving the smallest key rate is returned.
    """
    check_regime(d, m, allow_nonprime)
    rates, q, gaps = _prepare(d, m, rates)
    v = (d - 1) * (d - m + 1) / (m - 1)

    if m == d + 1:
        return AsymptoticSolution(
            d, m, float(q), 0.0, 0.0, float(1 - q), float(gaps[0] / (d - 1)),
            tuple(float(g) / (d - 1) for g in gaps[1:]), rate_max_mubs(d, rates),
        )

    if q == 0:
        eta = 0.0
    elif gaps.min() == 0:
        # some coefficient group is pinned to zero, which forces eta = 0
        eta = 0.0
    else:
        roots = _find_eta_roots(d, m, q, v, gaps)
        if not roots:
            raise NoFeasibleRootError(f"no feasible eta for d={d}, m={m}, rates={rates.tolist()}")
        eta = min(roots, key=lambda e: _rate_from_eta(d, m, q, v, e, rates, gaps))

    rest = np.clip(gaps - v * eta, 0.0, None) / (d - 1)
    return AsymptoticSolution(
        d=d, m=m, q=float(q), v=float(v), eta=float(eta),
        lambda00=float(1 - q + v * eta),
        lambda_z=float(rest[0]),
        lambda_k=tuple(float(x) for x in rest[1:]),
        rate=_rate_from_eta(d, m, q, v, eta, rates, gaps),
    )


def rate_general(d, m, rates, allow_nonprime=False):
    """Asymptotic key rate for m bases and arbitrary (feasible) error rates."""
    return solve_eta(d, m, rates, allow_nonprime).rate


def rate_symmetric(d, m, Q, allow_nonprime=False):
    """rate_general with the same error Q in every measured basis."""
    return rate_general(d, m, [Q] * m, allow_nonprime)


def symmetric_rate_array(d, m, x):
    """Vectorized symmetric-error rate; NaN where the error is infeasible.

    Solves the eta condition with a safeguarded Newton iteration in the
    logit of s = v eta / a (a = x / (m - 1)), in which the residual is
    strictly increasing with slope between m - 1 and m + 1.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.full(x.shape, np.nan)
    q = m * x / (m - 1)
    ok = (x >= 0) & (q <= 1)
    if m == d + 1:
        qq = (d + 1) * x[ok] / d
        qq = np.minimum(qq, 1.0)
        out[ok] = np.log2(d) + _xlog2x(qq) + _xlog2x(1 - qq) - qq * np.log2(d * d - 1)
        return out
    zero = ok & (x == 0)
    out[zero] = np.log2(d)
    live = ok & (x > 0)
    if not live.any():
        return out
    a = x[live] / (m - 1)
    qv = q[live]
    v = (d - 1) * (d - m + 1) / (m - 1)
    const = m * np.log(d - 1) - (m - 1) * np.log(v) - np.log(a)

    def g(u):
        s = expit(u)
        log_s = -np.logaddexp(0.0, -u)
        log_1ms = -np.logaddexp(0.0, u)
        val = const + np.log1p(-qv + a * s) + (m - 1) * log_s - m * log_1ms
        slope = a * s * (1 - s) / (1 - qv + a * s) + (m - 1) * (1 - s) + m * s
        return val, slope

    lo = np.full(a.shape, -1500.0)
    hi = np.full(a.shape, 1500.0)
    u = np.zeros_like(a)
    for _ in range(200):
        val, slope = g(u)
        lo = np.where(val < 0, u, lo)
        hi = np.where(val > 0, u, hi)
        step = val / slope
        nxt = u - step
        outside = (nxt <= lo) | (nxt >= hi)
        nxt = np.where(outside, 0.5 * (lo + hi), nxt)
        if np.all(np.abs(nxt - u) <= 1e-13 * np.maximum(1.0, np.abs(u))):
            u = nxt
            break
        u = nxt
    s = expit(u)
    one_minus_s = expit(-u)
    eta = a * s / v
    lam00 = 1 - qv + a * s
    lam_i = a * one_minus_s / (d - 1)
    n_eta = (d - 1) * (d - m + 1)
    out[live] = (
        np.log2(d) + _xlog2x(lam00) + m * (d - 1) * _xlog2x(lam_i) + n_eta * _xlog2x(eta)
    )
    return out


def max_tolerable_q(d, m, allow_nonprime=False, xtol=1e-12):
    """Smallest symmetric error rate at which the asymptotic rate reaches zero."""
    check_regime(d, m, allow_nonprime)
    q_hi = (m - 1) / m
    grid = np.linspace(0.0, q_hi, 801)[1:]
    prev = 0.0
    for Q in grid:
        if rate_symmetric(d, m, Q, allow_nonprime) <= 0:
            return brentq(
                lambda z: rate_symmetric(d, m, z, allow_nonprime), prev, Q, xtol=xtol
            )
        prev = Q
    raise NoFeasibleRootError(f"rate stays positive up to Q={q_hi} for d={d}, m={m}")
