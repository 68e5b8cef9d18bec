"""Check the analytic optimum against brute-force entropy maximization.

The oracle knows only the linear error-rate constraints on the d^2 Bell
coefficients; it does not assume which coefficients end up equal.
"""

import numpy as np

from hdqkd import asymptotic as asy
from hdqkd.oracle import ConstrainedProblem, oracle_rate, solve

for d, m, rates in [
    (3, 2, (0.07, 0.03)),
    (3, 3, (0.05, 0.10, 0.08)),
    (5, 3, (0.05, 0.05, 0.05)),
    (5, 4, (0.04, 0.05, 0.045, 0.035)),
    (7, 8, (0.1,) * 8),
]:
    analytic = asy.rate_general(d, m, rates)
    numeric = oracle_rate(ConstrainedProblem(d, m, rates))
    print(f"d={d} m={m} rates={rates}: analytic {analytic:.10f}  oracle {numeric:.10f}  diff {abs(analytic - numeric):.1e}")

# the free coefficients come out equal, as the analytic solution assumes
res = solve(ConstrainedProblem(5, 3, (0.05, 0.05, 0.05)))
lam = res.state.lambdas
print("\noptimal Bell coefficients, d=5, m=3, Q=0.05 (Newton iterations: %d)" % res.iterations)
print(np.array2string(lam, precision=6, suppress_small=False))
