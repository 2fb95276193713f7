"""Where the linearized variances track the exact closed forms.

Scans the pump photon number at a fixed small anisotropy and prints the
relative V2 disagreement next to the validity flags.
"""

import math

import numpy as np

from kerrpol.analytic import exact_stokes_moments
from kerrpol.linearized import linearized_variances
from kerrpol.params import KerrParams

params = KerrParams(gamma_h=2e-5, gamma_v=1e-5, gamma=5e-6)
print(f"{'n_h':>10} {'V2 lin/Vcoh':>12} {'V2 exact/Vcoh':>14} {'rel diff':>9} {'valid':>6} {'coherence':>10}")
for n_h in np.geomspace(1e2, 1e7, 11):
    a_h, a_v = math.sqrt(n_h), math.sqrt(1e-3 * n_h) * np.exp(-0.7j)
    lin = linearized_variances(a_h, a_v, params)
    ex = exact_stokes_moments(a_h, a_v, params)
    diff = abs(lin.v2 - ex.variance[2]) / lin.v_coh
    print(f"{n_h:10.3g} {lin.v2 / lin.v_coh:12.5f} {ex.variance[2] / lin.v_coh:14.5f} "
          f"{diff:9.2e} {str(bool(lin.valid)):>6} {ex.coherence:10.3g}")
