"""Recovering the order of offsets from a chain-of-offsets signal.

Ten sensors see the same periodic wave with different delays. The phases of
the leading eigenvector of the lead matrix come out in the cyclic order of
the delays, possibly traversed backwards.

Run: python3 demos/coom_recovery.py
"""

import numpy as np

from cyclicity.coom import PeriodicCOOM, coom_lead_matrix, offset_cyclic_order, phase_order_recovery
from cyclicity.simulate import empirical_lead_matrix

rng = np.random.default_rng(0)
N = 10
offsets = rng.uniform(0, 1, N)
truth = offset_cyclic_order(offsets)
print("offset order:", truth.tolist())

for second in [0.0, 0.3, 0.8]:
    fourier = {1: 1.0, 2: second} if second else {1: 1.0}
    model = PeriodicCOOM(1.0, fourier, np.ones(N), offsets)
    A = coom_lead_matrix(model)
    rep = phase_order_recovery(A, truth)
    sampled = empirical_lead_matrix(model.sample(4096).values)
    print(f"second harmonic {second:.1f}: |l1/l3| = {rep.ratio:9.3g}, "
          f"recovered {rep.order.tolist()} ({rep.orientation}), "
          f"sampling gap {np.abs(sampled - A).max():.1e}")
