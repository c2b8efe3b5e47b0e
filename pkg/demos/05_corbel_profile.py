"""
Scoring corbel support profiles
===============================

A corbel is a bracket jutting from a wall. Its profile curve closes
against the wall x = 0; the score trades the gravity moment of the
enclosed material against how far the centroid sits from a target.
Lower is better.
"""

import numpy as np

from gmfoo import CorbelConfig, CurveProfile, GeometryError, corbel_objective

heights = np.linspace(0.0, 2.0, 192)

# a plain rectangular bracket: area 2, centroid (0.5, 1)
rectangle = CurveProfile.from_xy(np.ones(192), heights)
print("rectangle :", corbel_objective(rectangle))

# tapering toward the top sheds mass far from the wall
taper = CurveProfile.from_xy(1.0 - 0.4 * heights / 2.0, heights)
print("taper     :", corbel_objective(taper))

# a hollow-backed curve does even better
curve = CurveProfile.from_xy(1.0 - 0.45 * np.sqrt(heights / 2.0), heights)
print("concave   :", corbel_objective(curve))

# moving the centroid target rebalances the trade
cfg = CorbelConfig(target_centroid=(0.5, 1.0))
print("\nrectangle scored against target (0.5, 1):", corbel_objective(rectangle, cfg))

# degenerate or self-crossing profiles are rejected, not scored
flat = CurveProfile.from_xy(np.zeros(192), heights)
try:
    corbel_objective(flat)
except GeometryError as exc:
    print("\nzero-width profile ->", exc)

crossing = CurveProfile.from_xy(np.where(np.arange(192) < 96, 1.0, -1.0), heights)
try:
    corbel_objective(crossing)
except GeometryError as exc:
    print("crossing profile   ->", exc)
