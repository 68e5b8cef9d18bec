"""Finite-size key rates against collective and coherent attacks.

Security parameters are carried as base-2 logarithms throughout. The
postselection lift to coherent attacks multiplies the budget by
(N + 1)^(d^4 - 1), which for d = 5 is far outside double range.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from .asymptotic import shannon_binary, symmetric_rate_array
from .exceptions import UnsupportedBoundError

LN2 = math.log(2.0)

BOUNDS = ("aep", "eur")
ATTACKS = ("collective", "coherent")
EPS_MODES = ("derive-eps", "fixed-eps")


def _log2_sum(*log2_terms):
    return float(logsumexp(np.array(log2_terms) * LN2) / LN2)


@dataclass(frozen=True)
class SecuritySplit:
    """Smoothing, error-correction and privacy-amplification parameters, stored as log2."""

    log2_eps_smooth: float
    log2_eps_ec: float
    log2_eps_pa: float
    log2_eps_tot: float

    def __post_init__(self):
        used = _log2_sum(self.log2_eps_smooth, self.log2_eps_ec, self.log2_eps_pa)
        if used > self.log2_eps_tot + 1e-9:
            raise ValueError(
                f"eps + eps_EC + eps_PA = 2^{used:.6g} exceeds the budget 2^{self.log2_eps_tot:.6g}"
            )
        if self.log2_eps_tot > 0:
            raise ValueError("security budget must be below 1")

    @classmethod
    def from_values(cls, eps_smooth, eps_ec, eps_pa, eps_tot=None):
        if min(eps_smooth, eps_ec, eps_pa) <= 0:
            raise ValueError("security parameters must be strictly positive")
        if eps_tot is None:
            eps_tot = eps_smooth + eps_ec + eps_pa
        return cls(math.log2(eps_smooth), math.log2(eps_ec), math.log2(eps_pa), math.log2(eps_tot))

    @classmethod
    def from_weights(cls, log2_eps_tot, w_smooth, w_ec):
        """Split the full budget with fractions w_smooth, w_ec and 1 - w_smooth - w_ec."""
        w_pa = 1.0 - w_smooth - w_ec
        if min(w_smooth, w_ec, w_pa) <= 0:
            raise ValueError(f"weights must be positive, got {(w_smooth, w_ec, w_pa)}")
        return cls(
            log2_eps_tot + math.log2(w_smooth),
            log2_eps_tot + math.log2(w_ec),
            log2_eps_tot + math.log2(w_pa),
            log2_eps_tot,
        )

    @property
    def eps_smooth(self):
        return 2.0**self.log2_eps_smooth

    @property
    def eps_ec(self):
        return 2.0**self.log2_eps_ec

    @property
    def eps_pa(self):
        return 2.0**self.log2_eps_pa

    @property
    def eps_tot(self):
        return 2.0**self.log2_eps_tot

    def shifted(self, delta_log2):
        """Every parameter multiplied by 2**delta_log2."""
        return SecuritySplit(
            self.log2_eps_smooth + delta_log2,
            self.log2_eps_ec + delta_log2,
            self.log2_eps_pa + delta_log2,
            self.log2_eps_tot + delta_log2,
        )

    def as_dict(self):
        return {
            "log2_eps_smooth": self.log2_eps_smooth,
            "log2_eps_ec": self.log2_eps_ec,
            "log2_eps_pa": self.log2_eps_pa,
            "log2_eps_tot": self.log2_eps_tot,
        }


@dataclass(frozen=True)
class FiniteScenario:
    """Protocol parameters: N rounds of which k test rounds, tolerated error q_tol.

    ``C`` is the measurement incompatibility in bits (default log2 d), ``f``
    the error-correction inefficiency and ``p_pass`` the probability that the
    parameter-estimation test passes.
    """

    N: int
    k: int
    d: int
    m: int
    q_tol: float
    C: float = None
    f: float = 1.0
    p_pass: float = 1.0

    def __post_init__(self):
        if self.C is None:
            object.__setattr__(self, "C", math.log2(self.d))
        if not 0 < self.k < self.N:
            raise ValueError(f"need 0 < k < N, got k={self.k}, N={self.N}")
        if not 0 <= self.q_tol < 1:
            raise ValueError(f"q_tol={self.q_tol} outside [0, 1)")
        if not 0 < self.C <= math.log2(self.d) + 1e-12:
            raise ValueError(f"incompatibility C={self.C} outside (0, log2 d]")
        if self.f < 1:
            raise ValueError(f"inefficiency f={self.f} must be >= 1")
        if not 0 < self.p_pass <= 1:
            raise ValueError(f"p_pass={self.p_pass} outside (0, 1]")
        if not 2 <= self.m <= self.d + 1:
            raise ValueError(f"basis count m={self.m} outside [2, {self.d + 1}]")

    @property
    def n(self):
        return self.N - self.k


@dataclass(frozen=True)
class RateResult:
    """Secret bits per round, clamped at zero; ``raw_rate`` keeps the sign.

    ``raw_rate`` is -inf when the corrected error rate leaves the domain of
    the bound (e.g. Q + mu > 1/2 for the EUR bound).
    """

    rate: float
    raw_rate: float
    key_length: float
    split: SecuritySplit
    k: int
    N: int
    bound: str
    attack: str
    feasible: bool
    mu: float
    log2_eps_coh: float = None
    eps_mode: str = None

    def as_dict(self):
        out = {
            "rate": self.rate,
            "raw_rate": self.raw_rate,
            "key_length": self.key_length,
            "k": self.k,
            "n": self.N - self.k,
            "N": self.N,
            "bound": self.bound,
            "attack": self.attack,
            "feasible": self.feasible,
            "mu": self.mu,
        }
        out.update(self.split.as_dict())
        if self.log2_eps_coh is not None:
            out["log2_eps_coh"] = self.log2_eps_coh
            out["eps_mode"] = self.eps_mode
        return out


def mu_correction(N, k, n, m, eps_prime=None, *, log2_eps_prime=None):
    """Statistical correction sqrt(N (k~ + 1) ln(1/eps') / (n k~^2)) with k~ = k / m."""
    if log2_eps_prime is None:
        if eps_prime is None or not 0 < eps_prime <= 1:
            raise ValueError(f"eps_prime must lie in (0, 1], got {eps_prime}")
        log2_eps_prime = math.log2(eps_prime)
    if log2_eps_prime > 0:
        raise ValueError("eps_prime must not exceed 1")
    if k < m or n <= 0 or N <= 0:
        raise ValueError(f"need k >= m and n > 0, got N={N}, k={k}, n={n}, m={m}")
    kt = k / m
    return math.sqrt(N * (kt + 1) * (-log2_eps_prime * LN2) / (n * kt * kt))


def _mu_array(N, k, m, log2_eps_prime):
    kt = k / m
    n = N - k
    return np.sqrt(N * (kt + 1) * (-log2_eps_prime * LN2) / (n * kt * kt))


def leak_ec(Q, d, f=1.0):
    """Error-correction leakage per symbol, f (h(Q) + Q log2(d - 1))."""
    return f * (shannon_binary(Q) + Q * np.log2(d - 1))


def smooth_max_entropy_bound(n, d, x, exact=False):
    """Upper bound on the smooth max-entropy of n test symbols at error fraction x.

    ``exact`` evaluates log2 sum_{l <= n x} C(n, l) (d-1)^l; otherwise the
    closed form n (h(x) + x log2(d - 1)), valid for x <= 1/2.
    """
    if exact:
        l = np.arange(int(math.floor(n * x)) + 1)
        terms = gammaln(n + 1) - gammaln(l + 1) - gammaln(n - l + 1) + l * math.log(d - 1)
        return float(logsumexp(terms) / LN2)
    if x > 0.5:
        raise ValueError("closed-form bound requires x <= 1/2")
    return float(n * (shannon_binary(x) + x * math.log2(d - 1)))


def postselection_damping(N, d):
    """Rate penalty 2 (d^4 - 1) log2(N + 1) / N of the postselection lift."""
    return 2 * (d**4 - 1) * math.log2(N + 1) / N


def postselection_log2_factor(N, d):
    """log2 of (N + 1)^(d^4 - 1)."""
    return (d**4 - 1) * math.log2(N + 1)


def _aep_raw(N, d, m, Q, k, le, lec, lpa, f=1.0, p_pass=1.0):
    k = np.asarray(k, dtype=float)
    n = N - k
    mu = _mu_array(N, k, m, le + 0.5 * math.log2(p_pass))
    x = Q + mu
    r_inf = symmetric_rate_array(d, m, np.minimum(x, 1.0)).reshape(np.shape(x))
    if f != 1.0:
        r_inf = r_inf - (f - 1.0) * _leak_array(x, d)
    finite = (
        -1.0 - lec - 2.0 * lpa
        + 4.0 * np.sqrt(n) * math.log2(2 + math.sqrt(d)) * np.sqrt(1.0 - 2.0 * le)
    )
    raw = n / N * r_inf - finite / N
    return np.where(np.isfinite(raw), raw, -np.inf), mu


def _leak_array(x, d):
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    h = np.where((x > 0) & (x < 1), h, 0.0)
    return h + x * math.log2(d - 1)


def _eur_raw(N, d, m, Q, k, le, lec, lpa, C, f=1.0, p_pass=1.0):
    k = np.asarray(k, dtype=float)
    n = N - k
    mu = _mu_array(N, k, m, le + 0.5 * math.log2(p_pass))
    x = Q + mu
    per_symbol = C - (1.0 + f) * _leak_array(x, d) - (1.0 - lec + 2.0 * (-1.0 - lpa)) / n
    raw = n / N * per_symbol
    return np.where(x <= 0.5, raw, -np.inf), mu


def _result(raw, mu, split, k, N, bound, attack, **extra):
    raw = float(raw)
    feasible = bool(np.isfinite(raw) and raw > 0)
    rate = raw if feasible else 0.0
    return RateResult(
        rate=rate, raw_rate=raw, key_length=rate * N, split=split, k=int(k), N=int(N),
        bound=bound, attack=attack, feasible=feasible, mu=float(mu), **extra,
    )


def eur_rate(scenario, split):
    """Two-basis rate from the entropic uncertainty relation (collective attacks)."""
    s = scenario
    if s.m != 2:
        raise UnsupportedBoundError(f"the uncertainty-relation bound needs m = 2, got m = {s.m}")
    raw, mu = _eur_raw(
        s.N, s.d, s.m, s.q_tol, s.k, split.log2_eps_smooth, split.log2_eps_ec,
        split.log2_eps_pa, s.C, s.f, s.p_pass,
    )
    return _result(raw, mu, split, s.k, s.N, "eur", "collective")


def aep_rate(scenario, split):
    """Rate from the asymptotic equipartition bound, any m, symmetric errors (collective)."""
    s = scenario
    raw, mu = _aep_raw(
        s.N, s.d, s.m, s.q_tol, s.k, split.log2_eps_smooth, split.log2_eps_ec,
        split.log2_eps_pa, s.f, s.p_pass,
    )
    return _result(raw, mu, split, s.k, s.N, "aep", "collective")


def coherent_rate(scenario, split, mode="derive-eps"):
    """AEP rate lifted to coherent attacks by postselection.

    ``derive-eps``: ``split`` is the coherent-attack target; the collective
    computation runs at that budget divided by (N + 1)^(d^4 - 1).
    ``fixed-eps``: ``split`` is used for the collective computation as is
    and the (much larger) implied coherent-attack parameter is reported.
    """
    s = scenario
    shift = postselection_log2_factor(s.N, s.d)
    if mode == "derive-eps":
        col = aep_rate(s, split.shifted(-shift))
        log2_coh = split.log2_eps_tot
    elif mode == "fixed-eps":
        col = aep_rate(s, split)
        log2_coh = split.log2_eps_tot + shift
    else:
        raise ValueError(f"unknown eps mode {mode!r}; expected one of {EPS_MODES}")
    raw = col.raw_rate - postselection_damping(s.N, s.d)
    return _result(raw, col.mu, col.split, s.k, s.N, "aep", "coherent",
                   log2_eps_coh=log2_coh, eps_mode=mode)


# optimizer grids
_K_POINTS = 64
_W_POINTS = 10
_W_FLOOR = 1e-3
_REFINE_PASSES = 3
_REFINE_W_FLOOR = 1e-9


def _split_grid():
    w = np.geomspace(_W_FLOOR, 1.0 - 2 * _W_FLOOR, _W_POINTS)
    pairs = [(a, b) for a in w for b in w if 1.0 - a - b >= _W_FLOOR]
    return np.array(pairs)


def optimize_rate(N, d, m, q_tol, eps_tot=1e-10, bound="aep", attack="collective",
                  eps_mode="derive-eps", C=None, f=1.0, log2_eps_tot=None):
    """Best rate over test rounds k and the split of the security budget.

    Stage 1 scans a logarithmic k grid against a logarithmic mesh of budget
    fractions; stage 2 refines k and the two free fractions coordinate-wise
    with bounded Brent searches. The budget is always fully spent.
    """
    if bound not in BOUNDS:
        raise ValueError(f"unknown bound {bound!r}; expected one of {BOUNDS}")
    if attack not in ATTACKS:
        raise ValueError(f"unknown attack {attack!r}; expected one of {ATTACKS}")
    if bound == "eur" and m != 2:
        raise UnsupportedBoundError(f"the uncertainty-relation bound needs m = 2, got m = {m}")
    if bound == "eur" and attack != "collective":
        raise UnsupportedBoundError("the uncertainty-relation bound is evaluated for collective attacks only")
    if eps_mode not in EPS_MODES:
        raise ValueError(f"unknown eps mode {eps_mode!r}; expected one of {EPS_MODES}")
    N = int(N)
    if log2_eps_tot is None:
        log2_eps_tot = math.log2(eps_tot)
    C = math.log2(d) if C is None else C

    # budget seen by the collective computation
    lb = log2_eps_tot
    if attack == "coherent" and eps_mode == "derive-eps":
        lb = log2_eps_tot - postselection_log2_factor(N, d)

    def objective(k, w1, w2):
        le = lb + np.log2(w1)
        lec = lb + np.log2(w2)
        lpa = lb + np.log2(1.0 - w1 - w2)
        if bound == "eur":
            return _eur_raw(N, d, m, q_tol, k, le, lec, lpa, C, f)[0]
        return _aep_raw(N, d, m, q_tol, k, le, lec, lpa, f)[0]

    def finish(k, w1, w2):
        scen = FiniteScenario(N, int(k), d, m, q_tol, C=C, f=f)
        split = SecuritySplit.from_weights(log2_eps_tot, w1, w2)
        if attack == "coherent":
            return coherent_rate(scen, split, eps_mode)
        if bound == "eur":
            return eur_rate(scen, split)
        return aep_rate(scen, split)

    if N - 1 < m:
        raise ValueError(f"N={N} too small for m={m} test blocks")

    ks = np.unique(np.rint(np.geomspace(m, N - 1, _K_POINTS)).astype(np.int64))
    ws = _split_grid()
    vals = objective(ks[:, None].astype(float), ws[None, :, 0], ws[None, :, 1])
    flat = int(np.argmax(vals))
    ik, iw = np.unravel_index(flat, vals.shape)
    best_val = float(vals[ik, iw])
    k_best, (w1, w2) = float(ks[ik]), ws[iw]
    if not np.isfinite(best_val):
        return finish(k_best, w1, w2)

    def scalar(k, a, b):
        v = float(objective(np.array([k]), a, b)[0])
        return v if np.isfinite(v) else -1e6

    lk = math.log(k_best)
    lk_lo, lk_hi = math.log(m), math.log(N - 1)
    for _ in range(_REFINE_PASSES):
        res = minimize_scalar(lambda t: -scalar(math.exp(t), w1, w2),
                              bounds=(lk_lo, lk_hi), method="bounded", options={"xatol": 1e-6})
        if -res.fun > scalar(math.exp(lk), w1, w2):
            lk = res.x
        hi = math.log(1.0 - w2 - _REFINE_W_FLOOR)
        res = minimize_scalar(lambda t: -scalar(math.exp(lk), math.exp(t), w2),
                              bounds=(math.log(_REFINE_W_FLOOR), hi), method="bounded",
                              options={"xatol": 1e-6})
        if -res.fun > scalar(math.exp(lk), w1, w2):
            w1 = math.exp(res.x)
        hi = math.log(1.0 - w1 - _REFINE_W_FLOOR)
        res = minimize_scalar(lambda t: -scalar(math.exp(lk), w1, math.exp(t)),
                              bounds=(math.log(_REFINE_W_FLOOR), hi), method="bounded",
                              options={"xatol": 1e-6})
        if -res.fun > scalar(math.exp(lk), w1, w2):
            w2 = math.exp(res.x)

    # integer k: the better neighbour of the continuous optimum, never worse than the grid
    cands = sorted({max(m, min(N - 1, int(math.floor(math.exp(lk))))),
                    max(m, min(N - 1, int(math.ceil(math.exp(lk)))))})
    k_int = max(cands, key=lambda k: (scalar(k, w1, w2), -k))
    if scalar(k_int, w1, w2) < best_val:
        k_int, (w1, w2) = int(ks[ik]), ws[iw]
    return finish(k_int, w1, w2)


def asymptotic_limit(d, m, q_tol):
    """Symmetric asymptotic rate the finite-key rates approach as N grows."""
    return float(symmetric_rate_array(d, m, q_tol)[0])


__all__ = [
    "SecuritySplit", "FiniteScenario", "RateResult", "mu_correction", "leak_ec",
    "smooth_max_entropy_bound", "postselection_damping", "postselection_log2_factor",
    "eur_rate", "aep_rate", "coherent_rate", "optimize_rate", "asymptotic_limit",
]
