"""Closed-form worst-case limits for interval indicators.

Walks through the analytic side of the toolkit: the two-branch formula for
the limiting upper/lower probability of [a, b] under mean ambiguity, its
reduction to the symmetric case by translating endpoints, and the
reflected-drift transition density whose interval mass reproduces the same
numbers by quadrature.
"""

import numpy as np
from scipy.integrate import quad

from ambiclt import (
    interval,
    lower_indicator_limit,
    normal_cdf,
    one_sided_limit,
    reflected_density,
    shift_reduce,
    upper_indicator_limit,
)

iv = interval(-0.3, 0.3)
print("ambiguity interval [-0.3, 0.3], unit variance\n")

print("two-sided indicator limits on [a, b]:")
print(f"{'a':>6} {'b':>6} {'upper':>10} {'lower':>10} {'width':>9}")
for a, b in [(-0.5, 0.5), (-1.0, 1.0), (-2.0, 2.0), (-1.0, 3.0), (0.5, 1.5)]:
    up = upper_indicator_limit(iv, a, b)
    lo = lower_indicator_limit(iv, a, b)
    print(f"{a:6.1f} {b:6.1f} {up:10.6f} {lo:10.6f} {up - lo:9.6f}")

print("\nzero ambiguity collapses both sides to the normal probability:")
flat = interval(0.0, 0.0)
a, b = -1.959964, 1.959964
print(f"  upper = {upper_indicator_limit(flat, a, b):.6f}"
      f"  lower = {lower_indicator_limit(flat, a, b):.6f}"
      f"  Phi(b)-Phi(a) = {normal_cdf(0, b) - normal_cdf(0, a):.6f}")

print("\none-sided indicators use the extreme drifts directly:")
print(f"  upper P(B <= 0)  = {one_sided_limit(iv, 0.0, 'left_tail', 'upper'):.6f}"
      "   (drift at the lower mean)")
print(f"  lower P(B <= 0)  = {one_sided_limit(iv, 0.0, 'left_tail', 'lower'):.6f}")
print(f"  upper P(B >= 1)  = {one_sided_limit(iv, 1.0, 'right_tail', 'upper'):.6f}"
      "   (drift at the upper mean)")

print("\nshift reduction: an off-center interval is the centered case moved over")
off = interval(0.0, 0.6)
kappa, c = shift_reduce(off)
print(f"  [0, 0.6] -> kappa={kappa}, center={c}")
print(f"  upper([0,0.6], -0.5, 1.5)          = {upper_indicator_limit(off, -0.5, 1.5):.12f}")
print(f"  upper([-0.3,0.3], -0.5-c, 1.5-c)   = "
      f"{upper_indicator_limit(iv, -0.5 - c, 1.5 - c):.12f}")

print("\nthe same limit from the reflected-drift density q_x(1, .):")
a, b, kappa = -1.0, 1.0, 0.3
cpt = -(a + b) / 2.0
half = (b - a) / 2.0
mass, _ = quad(lambda z: reflected_density(cpt, kappa, 1.0, z), -half, half,
               points=[0.0], limit=200)
print(f"  integral of q over [-(b-a)/2, (b-a)/2] = {mass:.12f}")
print(f"  closed form                            = "
      f"{upper_indicator_limit(interval(-kappa, kappa), a, b):.12f}")

total_lo, _ = quad(lambda z: reflected_density(cpt, kappa, 1.0, z), -30, 0)
total_hi, _ = quad(lambda z: reflected_density(cpt, kappa, 1.0, z), 0, 30)
print(f"  total mass                             = {total_lo + total_hi:.12f}")

print("\ndensity profile flattens into double-exponential tails:")
zs = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
print("  z:", "  ".join(f"{z:7.2f}" for z in zs))
print("  q:", "  ".join(f"{reflected_density(0.0, 0.3, 1.0, z):7.4f}" for z in zs))
