"""Finite-size rates at d = 5, Q = 0.05, eps_tot = 1e-10.

Shows where adding a fourth basis starts to pay off, for collective and for
coherent attacks, and how close the rates get to the asymptotic values.
"""

import numpy as np

from hdqkd import asymptotic as asy
from hdqkd.finite import optimize_rate
from hdqkd.sweeps import log_grid_crossover

d, Q, eps = 5, 0.05, 1e-10
grid = [int(x) for x in np.logspace(5, 10, 21)]

for attack in ("collective", "coherent"):
    r3 = [optimize_rate(N, d, 3, Q, eps, attack=attack).rate for N in grid]
    r4 = [optimize_rate(N, d, 4, Q, eps, attack=attack).rate for N in grid]
    print(f"{attack}: m=4 overtakes m=3 at N ~ {log_grid_crossover(grid, r3, r4):.2e}")

print("\n N        AEP m=2   EUR m=2   AEP m=3")
for N in (10**5, 10**6, 10**7, 10**8, 10**9):
    a2 = optimize_rate(N, d, 2, Q, eps).rate
    e2 = optimize_rate(N, d, 2, Q, eps, bound="eur").rate
    a3 = optimize_rate(N, d, 3, Q, eps).rate
    print(f"{N:.0e}   {a2:.4f}    {e2:.4f}    {a3:.4f}")

best = optimize_rate(10**8, d, 3, Q, eps)
print(f"\nN=1e8, m=3: {best.k} test rounds, mu = {best.mu:.4f}, "
      f"split log2 = {best.split.log2_eps_smooth:.2f} / {best.split.log2_eps_ec:.2f} / {best.split.log2_eps_pa:.2f}")

print("\nN = 1e12 against the asymptotic rate:")
for m in range(2, 7):
    fin = optimize_rate(10**12, d, m, Q, eps).rate
    print(f"  m={m}: {fin:.5f} vs {asy.rate_symmetric(d, m, Q):.5f}")
