"""Numerical look at the binomial matrix A_N of the near-unstable ring.

Prints the distance of the top eigenvalue to 2/pi, a Gershgorin radius with a
closed form, and any conjecture check that fails for N up to 64.

Run: python3 demos/binomial_conjectures.py
"""

import numpy as np

from cyclicity.cyclic_lead import binomial_matrix, numeric_conjecture_checks
from cyclicity.spectral import gershgorin_radii

print("  N   lambda1        |lambda1 - 2/pi|   R_(N,N-1)   1 - N/2^N")
for N in [4, 8, 16, 20, 24, 32, 64]:
    H = binomial_matrix(N)
    l1 = np.linalg.eigvalsh(H)[-1]
    print(f"{N:>3}   {l1:.10f}   {abs(l1 - 2 / np.pi):.6e}     {gershgorin_radii(H)[N - 2]:.8f}  {1 - N / 2**N:.8f}")

report = numeric_conjecture_checks(range(3, 65), multi_N=[10])
print("\nfailed observations:")
for r in report.violations():
    print(f"  N={r.N:<3} {r.check:<14} {r.detail}")
