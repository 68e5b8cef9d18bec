import numpy as np
import pytest

from hdqkd import weyl
from hdqkd.exceptions import InvalidDimensionError

DIMS = range(2, 14)
PRIMES = (2, 3, 5, 7, 11, 13)


def test_shift_small_cases():
    np.testing.assert_array_equal(weyl.shift_op(2), [[0, 1], [1, 0]])
    X = weyl.shift_op(3)
    for j in range(3):
        e = np.eye(3)[j]
        np.testing.assert_array_equal(X @ e, np.eye(3)[(j + 1) % 3])


def test_clock_small_cases():
    np.testing.assert_allclose(weyl.clock_op(2), np.diag([1, -1]), atol=1e-15)
    w = np.exp(2j * np.pi / 3)
    np.testing.assert_allclose(weyl.clock_op(3), np.diag([1, w, w**2]), atol=1e-15)


@pytest.mark.parametrize("d", DIMS)
def test_weyl_relations(d):
    X, Z = weyl.shift_op(d), weyl.clock_op(d)
    I = np.eye(d)
    assert np.abs(np.linalg.matrix_power(X, d) - I).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(Z, d) - I).max() < 1e-12
    assert np.abs(Z @ X - weyl.omega(d) * X @ Z).max() < 1e-12
    for op in (X, Z, weyl.weyl_op(d, 1, d - 1)):
        assert np.abs(op.conj().T @ op - I).max() < 1e-12


def test_weyl_op_examples():
    np.testing.assert_allclose(weyl.weyl_op(4, 0, 0), np.eye(4))
    np.testing.assert_allclose(weyl.weyl_op(2, 1, 1), [[0, -1], [1, 0]], atol=1e-15)
    X, Z = weyl.shift_op(5), weyl.clock_op(5)
    np.testing.assert_allclose(weyl.weyl_op(5, 2, 3), X @ X @ Z @ Z @ Z, atol=1e-12)
    # exponents are taken mod d
    np.testing.assert_allclose(weyl.weyl_op(5, 7, -2), weyl.weyl_op(5, 2, 3), atol=1e-12)


def test_bell_state_small():
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(weyl.bell_state(2), [s, 0, 0, s], atol=1e-15)
    v = weyl.bell_state(3)
    np.testing.assert_allclose(v[[0, 4, 8]], 1 / np.sqrt(3))
    assert np.isclose(np.linalg.norm(v), 1)


def test_bell_basis_qubit_states():
    s = 1 / np.sqrt(2)
    expected = [np.array(v) * s for v in ([1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0])]
    got = [weyl.bell_basis_vector(2, a, b) for a in (0, 1) for b in (0, 1)]
    for v in got:
        # each is one of the four Bell states up to a global phase
        assert max(abs(np.vdot(e, v)) for e in expected) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(weyl.bell_basis_vector(4, 0, 0), weyl.bell_state(4))


@pytest.mark.parametrize("d", range(2, 8))
def test_bell_basis_orthonormal_complete(d):
    B = weyl.bell_basis(d)
    assert np.abs(B.conj().T @ B - np.eye(d * d)).max() < 1e-12
    assert np.abs(B @ B.conj().T - np.eye(d * d)).max() < 1e-12
    a = d - 1
    np.testing.assert_allclose(B[:, a * d + 1], weyl.bell_basis_vector(d, a, 1))


def test_mub_vector_k0_is_fourier():
    d = 5
    w = np.exp(2j * np.pi / d)
    for j in range(d):
        np.testing.assert_allclose(weyl.mub_vector(d, 0, j), w ** (np.arange(d) * j) / np.sqrt(d), atol=1e-12)


def test_mub_qubit_circular_basis():
    Y = np.array([[0, -1j], [1j, 0]])
    for j in range(2):
        v = weyl.mub_vector(2, 1, j)
        # eigenvector of XZ = -iY, so of Y as well
        mu = np.vdot(v, Y @ v)
        assert np.linalg.norm(Y @ v - mu * v) < 1e-12


@pytest.mark.parametrize("d", (2, 3, 4, 5, 6, 7))
def test_mub_eigen_residuals(d):
    for k in range(d):
        op = weyl.weyl_op(d, 1, k)
        for j in range(d):
            v = weyl.mub_vector(d, k, j)
            mu = np.vdot(v, op @ v)
            assert abs(abs(mu) - 1) < 1e-10
            assert np.linalg.norm(op @ v - mu * v) < 1e-10


@pytest.mark.parametrize("d", PRIMES)
def test_full_mub_set_prime(d):
    bases = weyl.measured_bases(d, d + 1)
    assert len(bases) == d + 1
    for i, a in enumerate(bases):
        assert np.abs(a @ a.conj().T - np.eye(d)).max() < 1e-12
        for b in bases[i + 1:]:
            assert weyl.check_mutually_unbiased(a, b) < 1e-10


def test_check_mutually_unbiased_examples():
    z = weyl.z_basis(5)
    assert weyl.check_mutually_unbiased(z, z) == pytest.approx(1 - 1 / 5)
    for k in range(5):
        assert weyl.check_mutually_unbiased(z, weyl.mub_basis(5, k)) < 1e-12
    assert weyl.check_mutually_unbiased(weyl.z_basis(6), weyl.mub_basis(6, 0)) < 1e-12
    with pytest.raises(InvalidDimensionError):
        weyl.check_mutually_unbiased(np.eye(3), np.eye(4))


def test_max_num_mubs():
    assert weyl.max_num_mubs(5) == 6
    assert weyl.max_num_mubs(6) == 3
    assert weyl.max_num_mubs(2) == 3
    assert weyl.max_num_mubs(4) == 3


def test_primality_helpers():
    assert [n for n in range(20) if weyl.is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert [n for n in range(2, 30) if weyl.is_prime_power(n) and not weyl.is_prime(n)] == [4, 8, 9, 16, 25, 27]


def test_invalid_inputs():
    with pytest.raises(InvalidDimensionError):
        weyl.shift_op(1)
    with pytest.raises(IndexError):
        weyl.mub_vector(3, 3, 0)
    with pytest.raises(ValueError):
        weyl.measured_bases(3, 5)
