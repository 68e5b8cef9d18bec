import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdqkd import asymptotic as asy
from hdqkd import bell
from hdqkd.exceptions import InfeasibleRatesError, UnsupportedRegimeError

# golden value recorded from this implementation (root of the two-basis rate at d = 5)
QMAX_5_2 = 0.2098674112488683


def h(p):
    return 0.0 if p in (0, 1) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def two_basis(d, qx, qz):
    return math.log2(d) - h(qx) - h(qz) - (qx + qz) * math.log2(d - 1)


def full_set_symmetric(d, Q):
    q = (d + 1) * Q / d
    return math.log2(d) - h(q) - q * math.log2(d * d - 1)


def test_shannon_binary():
    assert asy.shannon_binary(0) == 0
    assert asy.shannon_binary(1) == 0
    assert asy.shannon_binary(0.5) == pytest.approx(1.0)
    assert asy.shannon_binary(0.11) == pytest.approx(-0.11 * math.log2(0.11) - 0.89 * math.log2(0.89), abs=1e-15)
    assert asy.shannon_binary(0.11) == pytest.approx(0.499916, abs=1e-6)
    np.testing.assert_allclose(asy.shannon_binary(np.array([0.0, 0.5])), [0, 1])
    with pytest.raises(ValueError):
        asy.shannon_binary(1.2)


def test_rate_two_mubs_examples():
    for d in (2, 3, 5, 17):
        assert asy.rate_two_mubs(d, 0, 0) == pytest.approx(math.log2(d))
    assert asy.rate_two_mubs(3, 0.03, 0.07) == pytest.approx(two_basis(3, 0.03, 0.07), abs=1e-14)
    assert abs(asy.rate_two_mubs(2, 0.11, 0.11)) < 1e-3
    assert asy.rate_two_mubs(5, 0.20, 0.20) > 0 > asy.rate_two_mubs(5, 0.22, 0.22)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.floats(0, 0.5), st.floats(0, 0.5))
def test_rate_two_mubs_symmetric_in_arguments(d, a, b):
    assert asy.rate_two_mubs(d, a, b) == pytest.approx(asy.rate_two_mubs(d, b, a), abs=1e-14)


def test_rate_max_mubs():
    assert asy.rate_max_mubs(3, [0, 0, 0, 0]) == pytest.approx(math.log2(3))
    for Q in (0.01, 0.1, 0.2):
        assert asy.rate_max_mubs(5, [Q] * 6) == pytest.approx(asy.rate_max_mubs_symmetric(5, Q), abs=1e-12)
    with pytest.raises(InfeasibleRatesError):
        asy.rate_max_mubs(3, [0.01, 0.02, 0.03, 0.04])
    with pytest.raises(ValueError):
        asy.rate_max_mubs(3, [0.1, 0.1])


def test_rate_max_mubs_symmetric():
    assert asy.rate_max_mubs_symmetric(7, 0) == pytest.approx(math.log2(7))
    assert asy.rate_max_mubs_symmetric(5, 0.05) == pytest.approx(full_set_symmetric(5, 0.05), abs=1e-14)
    assert asy.rate_max_mubs_symmetric(5, 0.05) == pytest.approx(asy.rate_symmetric(5, 6, 0.05), abs=1e-10)
    assert abs(asy.rate_max_mubs_symmetric(2, 0.1262)) < 1e-3
    with pytest.raises(ValueError):
        asy.rate_max_mubs_symmetric(2, 0.9)


@pytest.mark.parametrize("d", (2, 3, 5, 7))
def test_m2_eta_closed_form(d):
    for qx, qz in [(0.01, 0.02), (0.05, 0.1), (0.1, 0.03)]:
        sol = asy.solve_eta(d, 2, [qz, qx])
        assert sol.eta == pytest.approx(qx * qz / (d - 1) ** 2, rel=1e-10)


def test_full_set_has_no_free_coefficient():
    sol = asy.solve_eta(5, 6, [0.05] * 6)
    assert sol.v == 0 and sol.eta == 0 and sol.n_eta == 0
    assert sol.normalization() == pytest.approx(1.0, abs=1e-12)


def test_d5_m3_solution():
    rates = [0.05] * 3
    sol = asy.solve_eta(5, 3, rates)
    assert abs(asy.eta_polynomial_residual(5, 3, rates, sol.eta)) < 1e-12
    assert min(sol.lambda00, sol.lambda_z, *sol.lambda_k, sol.eta) >= 0
    assert sol.normalization() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("d,m,rates", [
    (5, 3, [0.05, 0.07, 0.06]),
    (5, 4, [0.04, 0.05, 0.045, 0.035]),
    (7, 3, [0.1, 0.08, 0.12]),
    (3, 3, [0.08, 0.12, 0.1]),
    (2, 2, [0.03, 0.09]),
])
def test_reconstructed_state_reproduces_rates(d, m, rates):
    sol = asy.solve_eta(d, m, rates)
    bds = sol.bell_state()
    np.testing.assert_allclose(bell.error_rates(bds, m), rates, atol=1e-10)
    assert bds.lambdas.sum() == pytest.approx(1, abs=1e-10)
    assert sol.rate == pytest.approx(math.log2(d) - bell.von_neumann_entropy(bds), abs=1e-12)


def test_degenerate_inputs():
    assert asy.rate_general(5, 3, [0, 0, 0]) == pytest.approx(math.log2(5))
    # q - Q_Z = 0 pins lambda_Z and eta to zero
    sol = asy.solve_eta(5, 3, [0.1, 0.05, 0.05])
    assert sol.eta == 0 and sol.lambda_z == 0
    assert sol.normalization() == pytest.approx(1.0)
    with pytest.raises(InfeasibleRatesError):
        asy.rate_general(5, 3, [0.2, 0.05, 0.05])


@pytest.mark.parametrize("d", (2, 3, 5, 7))
def test_closed_forms_match_general_path(d):
    rng = np.random.default_rng(d)
    for qx, qz in rng.uniform(0, 0.3, (20, 2)):
        assert abs(asy.rate_general(d, 2, [qz, qx]) - two_basis(d, qx, qz)) < 1e-10
    for Q in np.linspace(0, 0.9 * asy.max_tolerable_q(d, d + 1), 20):
        assert abs(asy.rate_symmetric(d, d + 1, Q) - full_set_symmetric(d, Q)) < 1e-10


def test_rate_increases_with_m():
    rates = [asy.rate_symmetric(5, m, 0.05) for m in range(2, 7)]
    assert all(b > a for a, b in zip(rates, rates[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.lists(st.floats(0.0, 0.12), min_size=5, max_size=5), st.integers(0, 4))
def test_rate_nonincreasing_in_each_error(m, base, i):
    d = 5
    rates = np.array(base[:m])
    i = i % m
    bumped = rates.copy()
    bumped[i] += 0.01
    try:
        lo = asy.rate_general(d, m, rates)
        hi = asy.rate_general(d, m, bumped)
    except InfeasibleRatesError:
        return
    assert hi <= lo + 1e-12


@pytest.mark.parametrize("d,m", [(2, 2), (3, 3), (5, 3), (5, 4), (7, 5), (11, 4)])
def test_vectorized_symmetric_rate(d, m):
    x = np.linspace(0, 0.35, 36)
    fast = asy.symmetric_rate_array(d, m, x)
    slow = [asy.rate_symmetric(d, m, Q) for Q in x]
    np.testing.assert_allclose(fast, slow, atol=1e-11)
    assert np.isnan(asy.symmetric_rate_array(d, m, 0.99))[0]


def test_thresholds():
    assert asy.max_tolerable_q(2, 2) == pytest.approx(0.1100, abs=1e-4)
    assert asy.max_tolerable_q(2, 3) == pytest.approx(0.1262, abs=1e-4)
    q52 = asy.max_tolerable_q(5, 2)
    assert 0.20 < q52 < 0.22
    assert q52 == pytest.approx(QMAX_5_2, abs=1e-10)
    assert asy.max_tolerable_q(5, 6) > q52
    assert abs(asy.rate_symmetric(5, 2, q52)) < 1e-10


@pytest.mark.parametrize("d", (2, 3, 5, 7, 11))
def test_full_set_beats_two_bases(d):
    assert asy.max_tolerable_q(d, d + 1) > asy.max_tolerable_q(d, 2)


@pytest.mark.slow
@pytest.mark.parametrize("d,ms", [(5, range(2, 7)), (47, range(2, 49))])
def test_threshold_gain_shrinks_with_m(d, ms):
    q = np.array([asy.max_tolerable_q(d, m) for m in ms])
    assert np.all(np.diff(q) > 0)
    assert np.all(np.diff(q, 2) < 0)


def test_regime_checks():
    with pytest.raises(UnsupportedRegimeError):
        asy.rate_symmetric(6, 5, 0.01)
    assert np.isfinite(asy.rate_symmetric(6, 5, 0.01, allow_nonprime=True))
    assert np.isfinite(asy.rate_symmetric(6, 3, 0.01))
    # prime power with the complete set is allowed
    assert asy.rate_symmetric(4, 5, 0.01) == pytest.approx(full_set_symmetric(4, 0.01), abs=1e-12)
    with pytest.raises(ValueError):
        asy.rate_symmetric(3, 5, 0.01)
    with pytest.raises(ValueError):
        asy.rate_general(3, 2, [0.1])
