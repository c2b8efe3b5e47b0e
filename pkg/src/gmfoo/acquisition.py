"""Expected improvement and its derivative-free maximizer.

The maximizer is a multi-start compass search: every restart advances in
lockstep so each poll step evaluates one predictive batch for all restarts
at once, which keeps the per-iteration cost dominated by a single
triangular solve instead of thousands of scalar model calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from gmfoo.core import lhs_sample

SIGMA_FLOOR = 1e-12
INITIAL_STEP_FRACTION = 0.1
FINAL_STEP_FRACTION = 1e-6
# Sufficient-decrease rule: a poll step counts as an improvement only when
# it gains at least this fraction of the current EI per unit step fraction;
# smaller gains halve the step, preventing long flat-ridge crawls.
IMPROVEMENT_RTOL = 1e-3

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AcquisitionQuery:
    """Point chosen by the acquisition maximizer.

    ``start_index`` records which restart produced the winner; ties between
    restarts resolve to the lowest index.
    """

    x: np.ndarray
    ei: float
    start_index: int

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))


def expected_improvement(mean, variance, f_min):
    """Expected improvement of a Gaussian belief below the incumbent.

    EI = (f_min - mean) * Phi(u) + sigma * phi(u) with u = (f_min - mean)/sigma.
    When sigma falls below 1e-12 the belief is treated as deterministic and
    EI degenerates to max(f_min - mean, 0). Accepts scalars or arrays.
    """
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    scalar = mean.ndim == 0 and variance.ndim == 0
    sigma = np.sqrt(np.maximum(variance, 0.0))
    improve = f_min - mean
    small = sigma < SIGMA_FLOOR
    safe_sigma = np.where(small, 1.0, sigma)
    u = improve / safe_sigma
    ei = improve * ndtr(u) + sigma * _INV_SQRT_2PI * np.exp(-0.5 * u * u)
    ei = np.where(small, np.maximum(improve, 0.0), ei)
    return float(ei) if scalar else ei


def _ei_batch(model, X, f_min):
    mean, var = model.predict(X)
    return expected_improvement(mean, var, f_min)


def maximize_ei(model, bounds, f_min, seed, restarts=None, max_polls=200):
    """Maximize expected improvement over a box by compass search.

    Starts from ``restarts`` Latin hypercube points (default 10 per
    dimension); each restart polls the 2d axis-aligned neighbours at the
    current step, moves to the best strictly improving one, and halves its
    step otherwise. Steps begin at 0.1 of the box width and a restart stops
    once its step drops below 1e-6 of the width. Returns the best point over
    all restarts as an :class:`AcquisitionQuery`.
    """
    if not np.isfinite(f_min):
        raise ValueError("f_min must be finite")
    d = bounds.dimension
    if restarts is None:
        restarts = 10 * d
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    width = bounds.width
    P = lhs_sample(restarts, bounds, seed)
    best_ei = _ei_batch(model, P, f_min)

    m = restarts
    # Per-restart step fraction; a restart is active while >= the floor.
    frac = np.full(m, INITIAL_STEP_FRACTION)
    # Axis offsets for the 2d compass directions, built once.
    directions = np.zeros((2 * d, d))
    directions[0::2, :] = np.eye(d)
    directions[1::2, :] = -np.eye(d)
    scaled_dirs = directions * width  # (2d, d)

    for _ in range(max_polls):
        active = frac >= FINAL_STEP_FRACTION
        if not active.any():
            break
        proposals = P[:, None, :] + frac[:, None, None] * scaled_dirs[None, :, :]
        np.clip(proposals, bounds.lower, bounds.upper, out=proposals)
        ei = _ei_batch(model, proposals.reshape(m * 2 * d, d), f_min)
        ei = ei.reshape(m, 2 * d)
        pick = np.argmax(ei, axis=1)
        picked_ei = ei[np.arange(m), pick]
        margin = IMPROVEMENT_RTOL * frac * np.abs(best_ei)
        improved = active & (picked_ei > best_ei + margin)
        P[improved] = proposals[improved, pick[improved]]
        best_ei[improved] = picked_ei[improved]
        frac[active & ~improved] *= 0.5

    winner = int(np.argmax(best_ei))
    return AcquisitionQuery(P[winner].copy(), float(best_ei[winner]), winner)
