"""Asymptotic key rates for d = 5 and every number of measured bases.

Run: python demos/01_asymptotic_rates.py
"""

import numpy as np

from hdqkd import asymptotic as asy

d = 5
Q = np.linspace(0, 0.3, 13)

# rate in bits per sifted symbol, one column per m; negative means no key
print("Q      " + "  ".join(f"m={m:<5d}" for m in range(2, d + 2)))
for q in Q:
    row = [asy.rate_symmetric(d, m, q) for m in range(2, d + 2)]
    print(f"{q:.3f}  " + "  ".join(f"{r:7.4f}" for r in row))

# the entropy-maximizing Bell coefficients behind one of these numbers
sol = asy.solve_eta(d, 3, [0.05, 0.05, 0.05])
print()
print(f"d=5, m=3, Q=0.05: rate {sol.rate:.6f}")
print(f"  lambda_00 = {sol.lambda00:.6f}")
print(f"  lambda_Z = lambda_X = lambda_XZ = {sol.lambda_z:.6f}")
print(f"  eta = {sol.eta:.3e} on {sol.n_eta} unconstrained coefficients")
print(np.round(sol.bell_state().lambdas, 5))

# asymmetric errors: two bases have a closed form, anything else goes through eta
print()
print("two bases, Q_X=0.03, Q_Z=0.07:", asy.rate_two_mubs(d, 0.03, 0.07))
print("general path, same input:   ", asy.rate_general(d, 2, [0.07, 0.03]))
