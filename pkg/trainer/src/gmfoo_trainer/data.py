"""Training corpora: synthetic grayscale images and curve CSV files.

The image corpus is generated procedurally so tests never download
anything. Each image is a filled disc with an antialiased rim on a 28 x 28
canvas; radius is the dominant factor of variation, so inked area tracks
whatever latent directions a code-recovery regularizer singles out.
"""

from __future__ import annotations

import numpy as np

from gmfoo_trainer.errors import DataError

IMAGE_SIDE = 28


def disc_images(n, seed, side=IMAGE_SIDE):
    """Generate n disc images flattened to (n, side * side), values in [0, 1].

    Radius, center, and shade vary independently per image. Shades stay
    above 0.7 so a 0.5 threshold recovers the disc support exactly.
    """
    if n < 1:
        raise DataError("image corpus needs n >= 1")
    rng = np.random.default_rng(seed)
    radius = rng.uniform(3.0, 10.0, n)
    cx = rng.uniform(9.0, side - 9.0, n)
    cy = rng.uniform(9.0, side - 9.0, n)
    shade = rng.uniform(0.7, 1.0, n)
    grid = np.arange(side) + 0.5
    dist = np.hypot(
        grid[None, None, :] - cx[:, None, None],
        grid[None, :, None] - cy[:, None, None],
    )
    # rim pixels fade linearly over one pixel of distance
    img = shade[:, None, None] * np.clip(radius[:, None, None] + 0.5 - dist, 0.0, 1.0)
    return img.reshape(n, side * side)


def load_curve_corpus(path, expected_dim=None):
    """Load a CSV corpus with one curve per row of comma-separated floats."""
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except OSError as exc:
        raise DataError(f"corpus file not found: {path}") from exc
    except ValueError as exc:
        raise DataError(f"{path}: not a numeric CSV: {exc}") from exc
    if X.size == 0:
        raise DataError(f"{path}: corpus is empty")
    if not np.isfinite(X).all():
        raise DataError(f"{path}: corpus contains non-finite values")
    if expected_dim is not None and X.shape[1] != expected_dim:
        raise DataError(
            f"{path}: rows have {X.shape[1]} columns, expected {expected_dim}"
        )
    return X
