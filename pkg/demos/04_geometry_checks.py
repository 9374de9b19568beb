"""
Low-dimensional verifiers
=========================

Mean widths, quermassintegrals and covering numbers in the plane and space.
"""
import math

import lqcentroid as lq
from lqcentroid import geom

# mean_width averages h over the sphere; for the unit square that is 2/pi
w, se = geom.mean_width(geom.SupportOracle.from_body(lq.Cube(2)), 20_000, seed=0)
print(f"mean width {w:.4f} +/- {se:.4f}  (2/pi = {2 / math.pi:.4f})")

# Steiner fit and Kubota projections agree on the cube
res = geom.quermassintegrals(lq.Cube(3), n_subspaces=500, n_samples=200_000)
print("Steiner W:", [round(float(x), 3) for x in res["steiner"]])
print("Kubota  W:", [round(float(x), 3) for x in res["kubota"]])

# covering counts sit above the packing lower bounds
cov = geom.covering_number(lq.Cube(2), [0.25, 0.5])
for r, c, p in zip(cov.radii, cov.cover, cov.packing):
    print(f"r = {r}: packing {p} <= covering {c}")
