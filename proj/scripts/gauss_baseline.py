"""Derives kLogCoshGaussBaseline = E[log cosh U], U ~ N(0, 1).

Adaptive quadrature at 30 significant digits, cross-checked with a 10^7
sample Monte Carlo estimate.

    python3 scripts/gauss_baseline.py
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def integrand(u):
    return mp.log(mp.cosh(u)) * mp.exp(-u * u / 2) / mp.sqrt(2 * mp.pi)


quad = mp.quad(integrand, [-mp.inf, -5, 0, 5, mp.inf])
print(f"quadrature : {mp.nstr(quad, 21)}")

rng = np.random.default_rng(0)
u = rng.standard_normal(10_000_000)
mc = np.log(np.cosh(u))
print(f"monte carlo: {mc.mean():.6f} +/- {mc.std() / np.sqrt(u.size):.6f}")
