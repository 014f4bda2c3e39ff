"""Geometry behind the L-shape bounds: kernel, eccentricity, cone angle, mean distance.

Run with ``python3 demos/l_shape_geometry.py``.
"""

import math

import numpy as np

from domainconst import (boundary_distance, exterior_cone_angle, l_shape, mean_distance,
                         star_shape_analysis)
from domainconst.geometry import polygon_kernel
from domainconst.bounds import cone_hardy_bound, star_poincare_bound

poly = l_shape()
data = star_shape_analysis(poly)
print("kernel vertices:", np.round(polygon_kernel(poly), 6).tolist())
print(f"eccentricity {data.eccentricity:.6f} about {np.round(data.center, 6).tolist()}"
      f" (r={data.inner_radius:.4f}, R={data.outer_radius:.4f})")
tight, loose = star_poincare_bound(data.eccentricity)
print(f"star bounds on P: {tight:.2f} (tight)  {loose:.2f} (loose)")

theta = exterior_cone_angle(poly)
print(f"exterior cone angle {theta / math.pi:.3f} pi, Hardy cap {cone_hardy_bound(theta, 2):.2f}")

for p in [(0.5, 0.5), (0.9, 0.9), (1.5, 0.5), (0.2, 1.7)]:
    ev = boundary_distance(poly, p)
    D = mean_distance(poly, p)
    print(f"p={p}: d={ev.value:.4f} D={D:.4f} D/d={D / ev.value:.3f}"
          + ("  (medial axis)" if ev.on_medial_axis else ""))
