"""Time-averaged lead matrices of a 5-sensor circulant OU process approach Q.

Run: python3 demos/slln_convergence.py
"""

import numpy as np

from cyclicity.circulant import CirculantSpec
from cyclicity.ou import OUParams, theoretical_lead_matrix
from cyclicity.simulate import SimConfig, simulate_lead

B = CirculantSpec([2.1, -0.2, -0.4, -0.6, -0.8]).dense()
params = OUParams(B, np.eye(5))
Q = theoretical_lead_matrix(B, params.diffusion)

checkpoints = [101, 1_001, 10_001, 100_001, 1_000_001]
leads = simulate_lead(params, SimConfig(checkpoints[-1], 0.01, seed=1), checkpoints)

print("theoretical Q:")
print(np.array2string(Q, precision=4, suppress_small=True))
print("\n       K   Q[1,2] estimate   relative Frobenius error")
for K in checkpoints:
    A = leads[K]
    print(f"{K:>8}   {A[0, 1]: .5f}          {np.linalg.norm(A - Q) / np.linalg.norm(Q):.4f}")
