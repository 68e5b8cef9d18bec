"""Largest tolerable symmetric error rate versus d and m.

More bases always help, but each extra basis buys less than the one before.
"""

import numpy as np

from hdqkd.asymptotic import max_tolerable_q

print("qubits: BB84 %.6f, six-state %.6f" % (max_tolerable_q(2, 2), max_tolerable_q(2, 3)))

q5 = np.array([max_tolerable_q(5, m) for m in range(2, 7)])
print("\nd=5, m=2..6:", np.round(q5, 5))
print("gain per extra basis:", np.round(np.diff(q5), 5))

print("\n d   m=2      m=d+1")
for d in (2, 3, 5, 7, 11, 13, 17, 19, 23):
    print(f"{d:2d}  {max_tolerable_q(d, 2):.5f}  {max_tolerable_q(d, d + 1):.5f}")
