"""Derive the reconstructed Fig. 1 panel parameters stored in src/kerrpol/fixtures.

Nothing here is published data. The panels only fix the morphology:
- gamma_h = 3 gamma, real amplitudes, pump photon number held fixed
- panel a: about 2.5 periods of sin(2 phi) across seed ratios [0, 1e-3]
- panel b: the first 1e-4 of that axis straddles the peak of sin(2 phi), so
  the minimum variance falls almost linearly
- panel c: 4x the pump photon number, same rates
- panel d: gamma_h = gamma_v

Run it to print the values; the fixture files carry them rounded.
"""

import math

from scipy.optimize import brentq

N_H = 1.0e6
DGAMMA = 1.0e-4  # gamma_h - gamma_v; 2 dg n_h r = 0.2 at r = 1e-3
R_MAX = 1.0e-3
SWING = 2.5 * math.pi  # decrease of 2 phi across [0, R_MAX]
R_PEAK = 5.0e-5  # where 2 phi should equal pi/2 (mod 2 pi)


def two_phi(gamma, r):
    # alphas real: phi = n_h sin(gamma_h - gamma) - n_v sin(gamma_v - gamma)
    gamma_h = 3 * gamma
    gamma_v = gamma_h - DGAMMA
    return 2 * (N_H * math.sin(gamma_h - gamma) - r * N_H * math.sin(gamma_v - gamma))


def main():
    # rate of 2 phi in r is 2 n_h sin(2 gamma - dg)
    guess = 0.5 * (math.asin(SWING / (2 * N_H * R_MAX)) + DGAMMA)
    target = two_phi(guess, R_PEAK)
    branch = math.floor((target - math.pi / 2) / (2 * math.pi))
    goal = math.pi / 2 + 2 * math.pi * branch
    width = math.pi / (4 * N_H)
    gamma = brentq(lambda g: two_phi(g, R_PEAK) - goal, guess - 2 * width, guess + 2 * width)
    gamma = float(f"{gamma:.12g}")
    print(f"n_h      = {N_H:g}")
    print(f"gamma    = {gamma!r}")
    print(f"gamma_h  = {3 * gamma!r}")
    print(f"gamma_v  = {3 * gamma - DGAMMA!r}")
    print(f"2phi(r=0) mod 2pi    = {two_phi(gamma, 0.0) % (2 * math.pi):.6f}")
    print(f"2phi(r=peak) mod 2pi = {two_phi(gamma, R_PEAK) % (2 * math.pi):.6f}  (pi/2 = {math.pi / 2:.6f})")
    print(f"swing over [0, {R_MAX:g}] = {two_phi(gamma, 0.0) - two_phi(gamma, R_MAX):.6f} rad")


if __name__ == "__main__":
    main()
