#!/usr/bin/env python3
"""Independent recomputation of the worked association-cost example.

One existing object (existence r = 1) observed by one detection whose
spatial score is the peak of a unit-covariance 2D Gaussian at its own
mean, n = 1/(2*pi). No clutter (lambda = 0), P_detect = 0.9, P_birth = 0.1.

    c_match      = -log( (1 - lambda) * P_D * r * n / (P_B + P_D * r * n) )
    c_unassigned = -log( (1 - lambda) - exp(-c_match) )

Prints both values to full double precision; the acceptance suite pins
its reference constants to this output.
"""

import math

lam = 0.0
p_detect = 0.9
p_birth = 0.1
r = 1.0
n = 1.0 / (2.0 * math.pi)

denom = p_birth + p_detect * r * n
mass = (1.0 - lam) * p_detect * r * n / denom
c_match = -math.log(mass)
c_unassigned = -math.log((1.0 - lam) - mass)

print(f"spatial score n      = {n!r}")
print(f"c_match      = {c_match!r}")
print(f"c_unassigned = {c_unassigned!r}")
