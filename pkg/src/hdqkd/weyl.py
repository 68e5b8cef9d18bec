"""Heisenberg-Weyl operators, the generalized Bell basis and MUB eigenbases.

Operators are returned as dense ``(d, d)`` complex numpy arrays and state
vectors as 1-d complex arrays (length ``d`` or ``d**2``). Bipartite vectors
use the ordering ``|a b> -> a * d + b`` (Alice first), i.e. ``np.kron``.
"""

import logging

import numpy as np

from .exceptions import InvalidDimensionError

log = logging.getLogger(__name__)


def _check_dim(d):
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def omega(d):
    """Primitive d-th root of unity exp(2 pi i / d)."""
    return np.exp(2j * np.pi / _check_dim(d))


def _root_power(d, exponent):
    # exact integer reduction before exponentiating keeps phases accurate for large exponents
    return np.exp(2j * np.pi * (np.asarray(exponent) % d) / d)


def shift_op(d):
    """Shift operator X with X|j> = |j+1 mod d>."""
    d = _check_dim(d)
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_op(d):
    """Clock operator Z = sum_j w^j |j><j|."""
    d = _check_dim(d)
    return np.diag(_root_power(d, np.arange(d)))


def weyl_op(d, alpha, beta):
    """Weyl operator X^alpha Z^beta, indices taken mod d."""
    d = _check_dim(d)
    alpha, beta = int(alpha) % d, int(beta) % d
    # X^a Z^b |j> = w^(b j) |j + a>
    j = np.arange(d)
    out = np.zeros((d, d), dtype=complex)
    out[(j + alpha) % d, j] = _root_power(d, beta * j)
    return out


def bell_state(d):
    """Maximally entangled state (1/sqrt d) sum_j |jj> on C^d (x) C^d."""
    d = _check_dim(d)
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return psi


def bell_basis_vector(d, alpha, beta):
    """Bell basis vector (1 (x) X^alpha Z^beta)|phi+>."""
    d = _check_dim(d)
    w = weyl_op(d, alpha, beta)
    # (1 (x) W)|phi+> = (1/sqrt d) sum_j |j> (x) W|j>, i.e. W^T reshaped row-wise
    return (w.T / np.sqrt(d)).reshape(d * d)


def bell_basis(d):
    """All d**2 Bell vectors as columns of a unitary, column index alpha * d + beta."""
    d = _check_dim(d)
    cols = [bell_basis_vector(d, a, b) for a in range(d) for b in range(d)]
    return np.stack(cols, axis=1)


def mub_vector(d, k, j):
    """Normalized j-th eigenvector of X Z^k.

    The phase is ``w^(l j + k l (l-1) / 2)`` for odd d and
    ``exp(i pi (2 l j + k l^2) / d)`` for even d. The eigenvalue is
    ``w^(-j)``.
    """
    d = _check_dim(d)
    if not (0 <= k < d and 0 <= j < d):
        raise IndexError(f"basis index k={k} and vector index j={j} must lie in [0, {d})")
    l = np.arange(d)
    if d % 2:
        amp = _root_power(d, l * j + k * (l * (l - 1) // 2))
    else:
        amp = np.exp(1j * np.pi * ((2 * l * j + k * l * l) % (2 * d)) / d)
    return amp / np.sqrt(d)


def z_basis(d):
    """Computational basis, one vector per row."""
    return np.eye(_check_dim(d), dtype=complex)


def mub_basis(d, k):
    """Eigenbasis of X Z^k, one vector per row (row j = mub_vector(d, k, j))."""
    d = _check_dim(d)
    return np.stack([mub_vector(d, k, j) for j in range(d)])


def measured_bases(d, m):
    """The m measured bases in protocol order: Z, X, XZ, ..., XZ^(m-2)."""
    d = _check_dim(d)
    if not 2 <= m <= d + 1:
        raise ValueError(f"basis count m={m} outside [2, {d + 1}]")
    return [z_basis(d)] + [mub_basis(d, k) for k in range(m - 1)]


def check_mutually_unbiased(a, b):
    """Largest deviation of |<a_i|b_j>|^2 from 1/d over all pairs.

    Bases are given with one vector per row.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"basis shapes {a.shape} and {b.shape} do not match")
    d = a.shape[0]
    overlaps = np.abs(a.conj() @ b.T) ** 2
    return float(np.max(np.abs(overlaps - 1.0 / d)))


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def is_prime_power(n):
    """True for p**e with p prime and e >= 1."""
    if n < 2:
        return False
    p = next(p for p in range(2, n + 1) if n % p == 0)
    while n % p == 0:
        n //= p
    return n == 1


def max_num_mubs(d):
    """Number of bases the Weyl construction guarantees to be mutually unbiased.

    d + 1 for prime d, otherwise 3 (Z, X and XZ).
    """
    d = _check_dim(d)
    if is_prime(d):
        return d + 1
    if is_prime_power(d):
        log.info("d=%d is a prime power: d+1 MUBs exist but are not built by the Weyl construction", d)
    return 3
