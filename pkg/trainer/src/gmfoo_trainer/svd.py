"""Linear latent baseline from a truncated singular value decomposition.

The exported generator is the top-d right-singular-vector map (latent to
data) with identity activation; the encoder is its transpose. Because the
columns are orthonormal, encoder(generator(c)) = c exactly, and the
composite data-side map is the best rank-d linear reconstruction of the
corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gmfoo_trainer.errors import DataError
from gmfoo_trainer.netio import layer_doc, network_doc


@dataclass(frozen=True)
class SvdResult:
    generator: dict  # gmfoo-net-v1 document, d -> D
    encoder: dict  # gmfoo-net-v1 document, D -> d
    relative_error: float  # Frobenius reconstruction error / corpus norm
    singular_values: tuple  # leading d values, largest first


def train_svd(X, d):
    """Fit the rank-d linear pair to a corpus with one design per row."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DataError("corpus must be a 2-D matrix of row designs")
    if not np.isfinite(X).all():
        raise DataError("corpus contains non-finite values")
    n, D = X.shape
    if d < 1:
        raise DataError("latent dimension must be at least 1")
    if n < d:
        raise DataError(f"corpus has {n} rows, need at least d = {d}")
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    tol = max(n, D) * np.finfo(float).eps * s[0]
    if d > s.size or s[d - 1] <= tol:
        raise DataError(f"corpus rank is below {d}")
    V = Vt[:d]
    generator = network_doc(d, D, [layer_doc(V.T, np.zeros(D), "identity")])
    encoder = network_doc(D, d, [layer_doc(V, np.zeros(d), "identity")])
    error = float(np.linalg.norm(X - X @ V.T @ V) / np.linalg.norm(X))
    return SvdResult(generator, encoder, error, tuple(s[:d].tolist()))
