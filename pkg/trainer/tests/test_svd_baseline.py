"""Linear baseline against independent low-rank oracles."""

import numpy as np
import pytest

from gmfoo_trainer import DataError, train_svd


def doc_forward(doc, x):
    """Evaluate a network document directly, independent of any consumer."""
    a = np.asarray(x, dtype=float)
    for layer in doc["layers"]:
        W = np.asarray(layer["weights"]).reshape(layer["rows"], layer["cols"])
        a = W @ a + np.asarray(layer["bias"])
        if layer["activation"] == "relu":
            a = np.maximum(a, 0.0)
        elif layer["activation"] == "tanh":
            a = np.tanh(a)
        elif layer["activation"] == "sigmoid":
            a = 1.0 / (1.0 + np.exp(-a))
    return a


def random_low_rank(n, D, rank, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, rank)) @ rng.normal(size=(rank, D))


class TestTrainSvd:
    def test_exact_rank_reconstructs_to_machine_precision(self):
        X = random_low_rank(30, 12, rank=4, seed=0)
        result = train_svd(X, 4)
        assert result.relative_error < 1e-8

    def test_encoder_inverts_generator(self):
        X = np.random.default_rng(1).normal(size=(25, 10))
        result = train_svd(X, 3)
        rng = np.random.default_rng(2)
        for _ in range(20):
            c = rng.uniform(-1.0, 1.0, 3)
            back = doc_forward(result.encoder, doc_forward(result.generator, c))
            assert np.max(np.abs(back - c)) < 1e-8

    def test_identical_rows_give_proportional_generator(self):
        row = np.array([3.0, 0.0, -4.0, 1.0])
        X = np.tile(row, (6, 1))
        result = train_svd(X, 1)
        out = doc_forward(result.generator, np.array([1.0]))
        # one latent unit spans the single data direction
        scale = out @ row / (row @ row)
        assert np.max(np.abs(out - scale * row)) < 1e-12
        assert abs(abs(scale) - 1.0 / np.linalg.norm(row)) < 1e-12

    def test_matches_eigendecomposition_oracle(self):
        X = np.random.default_rng(3).normal(size=(40, 15))
        for d in (1, 3, 7):
            result = train_svd(X, d)
            # second implementation: top-d eigenvectors of the Gram matrix
            evals, evecs = np.linalg.eigh(X.T @ X)
            P = evecs[:, -d:] @ evecs[:, -d:].T
            oracle = np.linalg.norm(X - X @ P) / np.linalg.norm(X)
            assert abs(result.relative_error - oracle) < 1e-8

    def test_error_matches_trailing_singular_values(self):
        X = np.random.default_rng(4).normal(size=(20, 9))
        s = np.linalg.svd(X, compute_uv=False)
        result = train_svd(X, 5)
        expected = np.sqrt(np.sum(s[5:] ** 2)) / np.linalg.norm(X)
        assert abs(result.relative_error - expected) < 1e-10

    def test_singular_values_recorded_descending(self):
        X = np.random.default_rng(5).normal(size=(18, 6))
        result = train_svd(X, 4)
        sv = np.asarray(result.singular_values)
        assert sv.shape == (4,)
        assert np.all(np.diff(sv) <= 0)

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(DataError, match="rank"):
            train_svd(random_low_rank(20, 8, rank=2, seed=6), 5)
        with pytest.raises(DataError, match="rows"):
            train_svd(np.eye(3), 4)
        with pytest.raises(DataError, match="at least 1"):
            train_svd(np.eye(3), 0)
        with pytest.raises(DataError, match="2-D"):
            train_svd(np.arange(5.0), 1)
        with pytest.raises(DataError, match="finite"):
            train_svd(np.full((4, 4), np.inf), 1)
        with pytest.raises(DataError, match="rank"):
            train_svd(np.zeros((5, 5)), 1)
