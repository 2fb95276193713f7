"""Optimal compression versus seed ratio at constant total photon number.

The linearized gain grows linearly with the seed and never saturates. The
measured plateau near 41% of the shot-noise level is not reproduced.

The analytic column is the exact model. It only squeezes this bright pump
because gamma = gamma_h: the cross-phase cancels the pump's self-phase, so
the pump does not phase-diffuse (with gamma = 0 the exact gain vanishes).
Its gain bends below the linear one once n_v |gamma_h - gamma_v| nears 0.1,
where the seed starts to diffuse instead.
"""

import numpy as np

from kerrpol.sweep import PointParams, seed_scan

TOTAL = 1e8
fixed = PointParams(n_h=TOTAL, gamma_h=1e-6, gamma_v=0.0, gamma=1e-6)
ratios = np.geomspace(1e-6, 2.5e-3, 12)

lin = seed_scan(fixed, ratios, engine="linearized")
exact = seed_scan(fixed, ratios, engine="analytic")

print(f"{'ratio':>10} {'n_v':>8} {'gain lin':>10} {'gain exact':>11} {'dB lin':>8} {'dB exact':>9}")
for a, b in zip(lin.rows, exact.rows):
    print(f"{a['ratio']:10.3g} {a['n_v']:8.3g} {a['gain']:10.4f} {b['gain']:11.4f} {a['db']:8.3f} {b['db']:9.3f}")
