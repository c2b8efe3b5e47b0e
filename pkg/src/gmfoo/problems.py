"""Benchmark objectives and the analytic generator pair used for testing.

The corbel objective scores a cantilevered support profile attached to a
wall at x = 0: the profile curve is closed against the wall, and the score
combines the gravity moment of the enclosed material about the wall with
the distance of its centroid from a target point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gmfoo.errors import GeometryError
from gmfoo.latent import Layer, LatentSpacePair, Network

PROFILE_POINTS = 192
DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class CurveProfile:
    """Open profile curve of exactly 192 (x, y) points.

    The first and last points define the span over which the curve closes
    against the wall segment x = 0.
    """

    points: np.ndarray  # (192, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (PROFILE_POINTS, 2):
            raise ValueError(f"profile must have exactly {PROFILE_POINTS} (x, y) points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("profile coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_xy(cls, x, y):
        return cls(np.column_stack([x, y]))

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def to_csv(self, path):
        np.savetxt(path, self.points, delimiter=",", header="x,y", comments="", fmt="%.17g")

    @classmethod
    def from_csv(cls, path):
        return cls(np.loadtxt(path, delimiter=",", skiprows=1))


@dataclass(frozen=True)
class CorbelConfig:
    """Weights and physical constants of the corbel score."""

    w1: float = 1.0
    w2: float = 10.0
    target_centroid: tuple = (0.0, 0.0)
    density: float = 1.0
    gravity: float = 1.0

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or self.w1 + self.w2 <= 0:
            raise ValueError("weights must be non-negative with w1 + w2 > 0")
        if self.density <= 0 or self.gravity <= 0:
            raise ValueError("density and gravity must be positive")


@dataclass(frozen=True)
class Problem:
    """Named minimization objective over design vectors of length input_dim."""

    name: str
    input_dim: int
    objective: callable
    direction: str = "minimize"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_dim,):
            raise ValueError(f"design vector must have length {self.input_dim}")
        return float(self.objective(x))


def _close_against_wall(profile):
    """Polygon from a profile closed via the wall: curve, (0, y_last), (0, y_first)."""
    pts = profile.points
    wall = np.array([[0.0, pts[-1, 1]], [0.0, pts[0, 1]]])
    poly = np.vstack([pts, wall])
    # Coincident consecutive vertices (profile touching the wall) add
    # zero-length edges; drop them so the intersection test stays sound.
    keep = np.ones(len(poly), dtype=bool)
    same = np.all(np.isclose(poly[1:], poly[:-1], rtol=0.0, atol=1e-12), axis=1)
    keep[1:][same] = False
    if np.all(np.isclose(poly[0], poly[keep][-1], rtol=0.0, atol=1e-12)):
        keep[np.nonzero(keep)[0][-1]] = False
    return poly[keep]


def _signed_area_centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y2 - x2 * y
    A = 0.5 * np.sum(cross)
    if abs(A) <= DEGENERATE_AREA:
        raise GeometryError("enclosed region is degenerate (area below 1e-12)")
    cx = np.sum((x + x2) * cross) / (6.0 * A)
    cy = np.sum((y + y2) * cross) / (6.0 * A)
    return A, cx, cy


def _check_simple(poly):
    """Reject polygons whose non-adjacent edges properly intersect."""
    n = len(poly)
    P, Q = poly, np.roll(poly, -1, axis=0)
    d = Q - P
    i, j = np.triu_indices(n, k=2)
    # Adjacent wrap-around pair (last edge, first edge) shares a vertex.
    mask = ~((i == 0) & (j == n - 1))
    i, j = i[mask], j[mask]

    def cross(v, w):
        return v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]

    r, s = d[i], d[j]
    qp = P[j] - P[i]
    denom = cross(r, s)
    eps = 1e-12
    nondegenerate = np.abs(denom) > eps
    safe = np.where(nondegenerate, denom, 1.0)
    t = cross(qp, s) / safe
    u = cross(qp, r) / safe
    proper = nondegenerate & (t > eps) & (t < 1 - eps) & (u > eps) & (u < 1 - eps)
    if np.any(proper):
        raise GeometryError("profile polygon is self-intersecting")


def corbel_objective(curve, cfg=None):
    """Score a corbel profile: gravity moment plus centroid-distance penalty.

    The profile is closed against the wall x = 0 between its endpoints'
    heights; with enclosed area A and centroid (Cx, Cy) the score is

        w1 * (density * A) * gravity * Cx + w2 * ||(Cx, Cy) - target||^2

    Lower is better: light material close to the wall and a centroid near
    the target. Degenerate (zero-area) or self-intersecting profiles raise
    GeometryError.
    """
    cfg = cfg or CorbelConfig()
    poly = _close_against_wall(curve)
    _check_simple(poly)
    A, cx, cy = _signed_area_centroid(poly)
    mass = cfg.density * abs(A)
    tx, ty = cfg.target_centroid
    moment = cfg.w1 * mass * cfg.gravity * cx
    penalty = cfg.w2 * ((cx - tx) ** 2 + (cy - ty) ** 2)
    return float(moment + penalty)


def area_objective(image, threshold=0.5):
    """Negative count of pixels above threshold (minimize to grow area)."""
    image = np.asarray(image, dtype=float)
    if image.shape != (784,):
        raise ValueError("image must be a flat vector of 784 pixels")
    return -float(np.count_nonzero(image > threshold))


def image_to_pgm(image, path, side=28):
    """Write a flat [0, 1] image as an ASCII PGM (P2) file for inspection."""
    image = np.asarray(image, dtype=float).reshape(side, side)
    grey = np.clip(np.rint(image * 255), 0, 255).astype(int)
    lines = ["P2", f"{side} {side}", "255"]
    lines += [" ".join(str(v) for v in row) for row in grey]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _sine_modes(D, k_max):
    """Columns k = 0..k_max-1 of sin((k+1) pi t) on the interior grid.

    The grid t_j = (j+1)/(D+1) makes the columns exactly orthogonal with
    squared norm (D+1)/2, so truncation is an exact projection.
    """
    j = np.arange(1, D + 1)
    k = np.arange(1, k_max + 1)
    return np.sin(np.pi * np.outer(j, k) / (D + 1))


def _default_target_code(d_high):
    k = np.arange(d_high)
    return 0.9 * (-1.0) ** k * (d_high - k) / d_high


def fourier_pair(D, d_high, d_low, objective="quadratic"):
    """Analytic generator/encoder pair with a known-structure objective.

    The generator superposes damped sine modes, x = sum_k 2^-k z_k s_k(t),
    so the leading coordinates carry most of the output variance and the
    low space is a faithful coarse parameterization. The encoder inverts
    the first d_low modes exactly by orthogonal projection.

    objective="quadratic" scores mean squared distance to a hidden target
    curve; objective="corbel" (D = 384 only) reads the output as a 192-point
    support profile and applies corbel_objective.

    Returns (LatentSpacePair, Problem).
    """
    if not 0 < d_low < d_high:
        raise ValueError("need 0 < d_low < d_high")
    if d_high > D // 2:
        raise ValueError("d_high must not exceed D/2")
    S = _sine_modes(D, d_high)
    amps = 2.0 ** -np.arange(d_high)
    gen_W = S * amps
    generator = Network(d_high, D, (Layer(gen_W, np.zeros(D), "identity"),))
    enc_W = (2.0 / (D + 1)) * (S[:, :d_low] / amps[:d_low]).T
    encoder = Network(D, d_low, (Layer(enc_W, np.zeros(d_low), "identity"),))
    pair = LatentSpacePair(d_high, d_low, generator, encoder)

    if objective == "quadratic":
        target = gen_W @ _default_target_code(d_high)

        def quadratic(x):
            return float(np.mean((x - target) ** 2))

        problem = Problem("fourier-quadratic", D, quadratic)
    elif objective == "corbel":
        base = corbel_design_problem()
        if base.input_dim != D:
            raise ValueError(f"corbel variant requires D = {base.input_dim}")
        problem = Problem("fourier-corbel", D, base.objective)
    else:
        raise ValueError(f"unknown objective variant {objective!r}")
    return pair, problem


def corbel_design_problem(cfg=None, name="corbel-profile"):
    """Corbel score over flat design vectors in roughly [-2, 2]^384.

    Consecutive value pairs average into one of 192 profile widths,
    x_j = 1 + 0.45 * (v_2j + v_2j+1) / 2, over heights linspace(0, 2), so
    any generator with outputs in [-2, 2] yields a positive-width profile.
    """
    cfg = cfg or CorbelConfig()
    heights = np.linspace(0.0, 2.0, PROFILE_POINTS)
    D = 2 * PROFILE_POINTS

    def score(x):
        v = np.asarray(x, dtype=float)
        widths = 1.0 + 0.45 * 0.5 * (v[0::2] + v[1::2])
        return corbel_objective(CurveProfile.from_xy(widths, heights), cfg)

    return Problem(name, D, score)
