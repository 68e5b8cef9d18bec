"""Self-verification suites run by ``hdqkd verify``.

Each suite returns a list of ``Check`` records (invariant name, observed
deviation, tolerance). The quick level covers d <= 3 and finishes in a few
seconds; the full level covers d <= 7.
"""

from dataclasses import dataclass
import time

import numpy as np

from . import asymptotic, bell, oracle, weyl

LEVELS = {"quick": (2, 3), "full": (2, 3, 5, 7)}


@dataclass
class Check:
    name: str
    value: float
    tol: float

    @property
    def ok(self):
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def _weyl_suite(dims, rng, fault):
    out = []
    for d in dims:
        X, Z = weyl.shift_op(d), weyl.clock_op(d)
        eye = np.eye(d)
        out.append(Check(f"X^d = 1 (d={d})", np.abs(np.linalg.matrix_power(X, d) - eye).max(), 1e-12))
        out.append(Check(f"Z^d = 1 (d={d})", np.abs(np.linalg.matrix_power(Z, d) - eye).max(), 1e-12))
        out.append(Check(f"ZX = wXZ (d={d})", np.abs(Z @ X - weyl.omega(d) * X @ Z).max(), 1e-12))
        B = weyl.bell_basis(d)
        out.append(Check(f"Bell basis orthonormal (d={d})",
                         np.abs(B.conj().T @ B - np.eye(d * d)).max(), 1e-12))
    return out


def _mub_suite(dims, rng, fault):
    out = []
    for d in dims:
        bases = weyl.measured_bases(d, d + 1)
        worst = max(weyl.check_mutually_unbiased(a, b)
                    for i, a in enumerate(bases) for b in bases[i + 1:])
        out.append(Check(f"pairwise unbiased (d={d})", worst, 1e-10))
        res = 0.0
        for k in range(d):
            op = weyl.weyl_op(d, 1, k)
            for psi in weyl.mub_basis(d, k):
                mu = psi.conj() @ op @ psi
                res = max(res, np.linalg.norm(op @ psi - mu * psi), abs(abs(mu) - 1))
        out.append(Check(f"XZ^k eigen-residual (d={d})", res, 1e-10))
    return out


def _symmetrization_suite(dims, rng, fault):
    out = []
    for d in dims:
        off = idem = drift = 0.0
        for _ in range(3):
            rho = bell.random_state(d, rng)
            tw = bell.symmetrize(rho)
            m = bell.bell_matrix_elements(tw)
            off = max(off, np.abs(m - np.diag(np.diag(m))).max())
            idem = max(idem, np.abs(bell.symmetrize(tw) - tw).max())
            for basis in weyl.measured_bases(d, min(d + 1, 4)):
                drift = max(drift, abs(bell.error_rate_in_basis(rho, basis)
                                       - bell.error_rate_in_basis(tw, basis)))
        out.append(Check(f"twirl is Bell-diagonal (d={d})", off, 1e-10))
        out.append(Check(f"twirl is idempotent (d={d})", idem, 1e-10))
        out.append(Check(f"twirl keeps error rates (d={d})", drift, 1e-10))
    return out


def _lambda_suite(dims, rng, fault):
    out = []
    for d in dims:
        lam = rng.dirichlet(np.ones(d * d)).reshape(d, d)
        bds = bell.BellDiagonalState(d, lam)
        rho = bell.state_from_lambda(bds)
        back = bell.lambda_from_state(rho).lambdas
        if fault:
            back = back.copy()
            back[0, 0] += 1e-3
        out.append(Check(f"lambda round trip (d={d})", np.abs(back - lam).max(), 1e-12))
        direct = bell.error_rates(bds, d + 1)
        meas = [bell.error_rate_in_basis(rho, b) for b in weyl.measured_bases(d, d + 1)]
        out.append(Check(f"error rates from lambda vs projectors (d={d})",
                         np.abs(np.subtract(direct, meas)).max(), 1e-12))
    return out


def _closed_form_suite(dims, rng, fault):
    out = []
    for d in dims:
        qmax = asymptotic.max_tolerable_q(d, 2)
        dev = 0.0
        for qx, qz in rng.uniform(0, 0.9 * qmax, (5, 2)):
            dev = max(dev, abs(asymptotic.rate_general(d, 2, (qz, qx))
                               - asymptotic.rate_two_mubs(d, qx, qz)))
        out.append(Check(f"m=2 closed form (d={d})", dev, 1e-10))
        dev = 0.0
        for Q in np.linspace(0, 0.9 * asymptotic.max_tolerable_q(d, d + 1), 5):
            dev = max(dev, abs(asymptotic.rate_symmetric(d, d + 1, Q)
                               - asymptotic.rate_max_mubs_symmetric(d, Q)))
        out.append(Check(f"m=d+1 closed form (d={d})", dev, 1e-10))
    return out


def _oracle_suite(dims, rng, fault):
    out = []
    for d in dims:
        for m in range(2, weyl.max_num_mubs(d) + 1):
            qmax = asymptotic.max_tolerable_q(d, m)
            dev = 0.0
            for Q in (0.3 * qmax, 0.7 * qmax):
                prob = oracle.ConstrainedProblem(d, m, (Q,) * m)
                dev = max(dev, abs(oracle.oracle_rate(prob) - asymptotic.rate_symmetric(d, m, Q)))
            out.append(Check(f"oracle agrees with analytic rate (d={d}, m={m})", dev, 1e-6))
    return out


def _threshold_suite(dims, rng, fault):
    return [
        Check("Q_max(2,2) near 0.1100", abs(asymptotic.max_tolerable_q(2, 2) - 0.1100), 5e-4),
        Check("Q_max(2,3) near 0.1262", abs(asymptotic.max_tolerable_q(2, 3) - 0.1262), 5e-4),
    ]


SUITES = (
    ("weyl", _weyl_suite),
    ("mub", _mub_suite),
    ("symmetrization", _symmetrization_suite),
    ("lambda", _lambda_suite),
    ("closed-form", _closed_form_suite),
    ("oracle", _oracle_suite),
    ("threshold", _threshold_suite),
)


def run_checks(level="quick", seed=0, inject_fault=False, out=print):
    """Run every suite; returns 0 if all checks pass, else 1.

    ``inject_fault`` corrupts one recovered Bell coefficient so the lambda
    suite must fail; it exists to test the failure path.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {tuple(LEVELS)}")
    dims = LEVELS[level]
    rng = np.random.default_rng(seed)
    failed = 0
    for name, suite in SUITES:
        t0 = time.perf_counter()
        checks = suite(dims, rng, inject_fault)
        bad = [c for c in checks if not c.ok]
        status = "FAIL" if bad else "ok"
        out(f"{name:<15} {status:<4} {len(checks) - len(bad)}/{len(checks)} "
            f"({time.perf_counter() - t0:.2f} s)")
        for c in bad:
            out(f"  failed invariant: {c.name}: {c.value:.3e} > {c.tol:.1e}")
        failed += len(bad)
    return 1 if failed else 0
