"""Symmetrization, Bell-diagonal states, error rates and entropies.

Density matrices are ``(d**2, d**2)`` complex arrays on Alice (x) Bob.
"""

from dataclasses import dataclass

import numpy as np

from . import weyl
from .exceptions import InvalidDimensionError, NotBellDiagonalError

BELL_DIAGONAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BellDiagonalState:
    """Bell-diagonal state given by its d x d grid of coefficients lambda[alpha, beta]."""

    dim: int
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.shape != (self.dim, self.dim):
            raise InvalidDimensionError(f"lambda grid shape {lam.shape} != ({self.dim}, {self.dim})")
        if lam.min() < -1e-12:
            raise ValueError(f"negative Bell coefficient {lam.min():.3e}")
        if abs(lam.sum() - 1.0) > 1e-10:
            raise ValueError(f"Bell coefficients sum to {lam.sum():.15f}, expected 1")
        lam = np.clip(lam, 0.0, None)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def uniform(cls, d):
        return cls(d, np.full((d, d), 1.0 / d**2))

    @classmethod
    def pure(cls, d, alpha=0, beta=0):
        lam = np.zeros((d, d))
        lam[alpha % d, beta % d] = 1.0
        return cls(d, lam)


@dataclass(frozen=True)
class ErrorRateSet:
    """Observed error rates (Q_Z, Q_X, Q_XZ, ..., Q_XZ^(m-2)) for m measured bases."""

    dim: int
    m: int
    rates: tuple

    def __post_init__(self):
        rates = tuple(float(q) for q in self.rates)
        if self.dim < 2:
            raise InvalidDimensionError(f"dimension must be >= 2, got {self.dim}")
        if not 2 <= self.m <= self.dim + 1:
            raise ValueError(f"basis count m={self.m} outside [2, {self.dim + 1}]")
        if len(rates) != self.m:
            raise ValueError(f"expected {self.m} error rates, got {len(rates)}")
        if any(not 0.0 <= q <= 1.0 for q in rates):
            raise ValueError(f"error rates must lie in [0, 1]: {rates}")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def symmetric(cls, d, m, q):
        return cls(d, m, (q,) * m)


def _dim_of(rho):
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDimensionError(f"density matrix must be square, got shape {rho.shape}")
    d = int(round(np.sqrt(rho.shape[0])))
    if d * d != rho.shape[0] or d < 2:
        raise InvalidDimensionError(f"matrix size {rho.shape[0]} is not d**2 for d >= 2")
    return d


def random_state(d, rng, rank=None):
    """Normalized Wishart-type state G G^dagger / Tr on C^d (x) C^d."""
    D = d * d
    rank = D if rank is None else rank
    g = rng.standard_normal((D, rank)) + 1j * rng.standard_normal((D, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _twirl_unitaries(d):
    for a in range(d):
        for b in range(d):
            yield np.kron(weyl.weyl_op(d, a, b), weyl.weyl_op(d, a, -b))


def symmetrize(rho):
    """Average of (L_ab (x) L_a,-b) rho (L_ab (x) L_a,-b)^dagger over all alpha, beta."""
    d = _dim_of(rho)
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for u in _twirl_unitaries(d):
        out += u @ rho @ u.conj().T
    out /= d * d
    return 0.5 * (out + out.conj().T)


def bell_matrix_elements(rho):
    """rho expressed in the Bell basis, index alpha * d + beta."""
    d = _dim_of(rho)
    b = weyl.bell_basis(d)
    return b.conj().T @ np.asarray(rho) @ b


def lambda_from_state(rho_tilde, tol=BELL_DIAGONAL_TOL):
    """Bell coefficients of a Bell-diagonal state.

    Raises NotBellDiagonalError when any Bell-basis coherence exceeds ``tol``.
    """
    d = _dim_of(rho_tilde)
    m = bell_matrix_elements(rho_tilde)
    off = np.abs(m - np.diag(np.diag(m)))
    worst = float(off.max())
    if worst > tol:
        raise NotBellDiagonalError(worst, tol)
    lam = np.diag(m).real.reshape(d, d)
    return BellDiagonalState(d, lam)


def state_from_lambda(bds):
    """Density matrix sum lambda_ab |phi_ab><phi_ab|."""
    b = weyl.bell_basis(bds.dim)
    return (b * bds.lambdas.reshape(-1)) @ b.conj().T


def weyl_coefficient(rho, k, l):
    """r_kl = Tr[(X^k Z^l (x) X^k Z^-l)^dagger rho]."""
    d = _dim_of(rho)
    op = np.kron(weyl.weyl_op(d, k, l), weyl.weyl_op(d, k, -l))
    return complex(np.trace(op.conj().T @ np.asarray(rho)))


def state_from_weyl_coefficients(r):
    """Rebuild (1/d^2) sum r_kl X^k Z^l (x) X^k Z^-l from a d x d grid of coefficients."""
    r = np.asarray(r)
    d = r.shape[0]
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            out += r[k, l] * np.kron(weyl.weyl_op(d, k, l), weyl.weyl_op(d, k, -l))
    return out / d**2


def error_rate_z(bds):
    """Q_Z = 1 - sum_alpha lambda[0, alpha]."""
    return float(np.clip(1.0 - bds.lambdas[0, :].sum(), 0.0, 1.0))


def error_rate_xzk(bds, k):
    """Q_{XZ^k} = 1 - sum_alpha lambda[alpha, k alpha mod d]."""
    d = bds.dim
    a = np.arange(d)
    return float(np.clip(1.0 - bds.lambdas[a, (k * a) % d].sum(), 0.0, 1.0))


def error_rates(bds, m):
    """[Q_Z, Q_X, Q_XZ, ..., Q_XZ^(m-2)] for a Bell-diagonal state."""
    return [error_rate_z(bds)] + [error_rate_xzk(bds, k) for k in range(m - 1)]


def error_rate_in_basis(rho, basis):
    """Probability that Alice (conjugated basis) and Bob (basis) disagree.

    ``basis`` holds one vector per row. Alice measures in the entrywise
    complex conjugate of the basis, so |phi+> is error free in every basis.
    """
    d = _dim_of(rho)
    basis = np.asarray(basis)
    if basis.shape != (d, d):
        raise InvalidDimensionError(f"basis shape {basis.shape} does not match d={d}")
    rho = np.asarray(rho)
    agree = 0.0
    for psi in basis:
        v = np.kron(psi.conj(), psi)
        agree += np.real(v.conj() @ rho @ v)
    return float(np.clip(1.0 - agree, 0.0, 1.0))


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def von_neumann_entropy(bds):
    """Entropy in bits of a Bell-diagonal state, -sum lambda log2 lambda."""
    return float(-_xlogx(bds.lambdas).sum())
