"""Core primitives: bounds, seeds, samples, datasets, LHS, standardization."""

import numpy as np
import pytest

from gmfoo import (
    Bounds,
    Dataset,
    Fidelity,
    Origin,
    RngSeed,
    Sample,
    lhs_sample,
    standardize_outputs,
)


class TestBounds:
    def test_validation(self):
        with pytest.raises(ValueError):
            Bounds([0.0, 0.0], [1.0])
        with pytest.raises(ValueError):
            Bounds([1.0], [0.0])
        with pytest.raises(ValueError):
            Bounds([0.0], [np.inf])

    def test_point_box_allowed(self):
        b = Bounds([0.5, -0.2], [0.5, -0.2])
        assert b.contains([0.5, -0.2])
        assert np.all(b.width == 0.0)

    def test_symmetric_unit(self):
        b = Bounds.symmetric_unit(3)
        assert b.dimension == 3
        assert np.array_equal(b.lower, [-1, -1, -1])
        assert np.array_equal(b.upper, [1, 1, 1])

    def test_contains_and_clip(self):
        b = Bounds([0.0, 0.0], [1.0, 2.0])
        assert b.contains([0.5, 1.5])
        assert not b.contains([1.5, 0.5])
        assert b.contains([1.0 + 1e-10, 0.0], atol=1e-9)
        assert np.array_equal(b.clip([2.0, -1.0]), [1.0, 0.0])

    def test_intersect(self):
        a = Bounds([0.0], [1.0])
        b = Bounds([0.5], [2.0])
        c = a.intersect(b)
        assert c.lower[0] == 0.5 and c.upper[0] == 1.0
        with pytest.raises(ValueError):
            a.intersect(Bounds([1.5], [2.0]))


class TestRngSeed:
    def test_same_seed_same_stream(self):
        a = RngSeed(7).generator().uniform(size=5)
        b = RngSeed(7).generator().uniform(size=5)
        assert np.array_equal(a, b)

    def test_derive_is_deterministic_and_distinct(self):
        s = RngSeed(123)
        assert s.derive("doe", "high") == s.derive("doe", "high")
        assert s.derive("doe", "high") != s.derive("doe", "low")
        assert s.derive("fit", 1) != s.derive("fit", 2)
        assert s.derive("a") != RngSeed(124).derive("a")

    def test_range_validation(self):
        with pytest.raises(ValueError):
            RngSeed(-1)
        with pytest.raises(ValueError):
            RngSeed(2**64)


class TestSampleDataset:
    def test_sample_validation(self):
        with pytest.raises(ValueError):
            Sample(np.array([0.0]), np.nan)
        s = Sample([0.1, 0.2], 1.5)
        assert s.fidelity is Fidelity.HIGH and s.origin is Origin.DOE

    def test_append_and_duplicate_rejection(self):
        ds = Dataset(2, Bounds.symmetric_unit(2))
        ds.append(Sample([0.1, 0.2], 1.0))
        with pytest.raises(ValueError):
            ds.append(Sample([0.1, 0.2], 2.0))
        # low-fidelity duplicates are allowed (exchange reproduces points)
        ds.append(Sample([0.1, 0.2], 2.0, Fidelity.LOW, Origin.EXCHANGED))
        ds.append(Sample([0.1, 0.2], 3.0, Fidelity.LOW, Origin.EXCHANGED))
        assert len(ds) == 3

    def test_bounds_enforced(self):
        ds = Dataset(1, Bounds([0.0], [1.0]))
        with pytest.raises(ValueError):
            ds.append(Sample([1.5], 0.0))

    def test_arrays_best_subset(self):
        ds = Dataset(1)
        ds.append(Sample([0.0], 3.0))
        ds.append(Sample([0.5], 1.0))
        ds.append(Sample([0.9], 2.0, Fidelity.LOW, Origin.EXCHANGED))
        X, y = ds.arrays(Fidelity.HIGH)
        assert X.shape == (2, 1) and np.array_equal(y, [3.0, 1.0])
        assert ds.best(Fidelity.HIGH).y == 1.0
        assert len(ds.subset(Fidelity.LOW)) == 1
        X_all, y_all = ds.arrays()
        assert X_all.shape == (3, 1)

    def test_empty_arrays(self):
        ds = Dataset(2)
        X, y = ds.arrays()
        assert X.shape == (0, 2) and y.shape == (0,)
        assert ds.best() is None

    def test_csv_round_trip(self, tmp_path):
        ds = Dataset(2)
        rng = np.random.default_rng(0)
        for i in range(5):
            ds.append(
                Sample(
                    rng.uniform(-1, 1, 2),
                    rng.normal(),
                    Fidelity.LOW if i % 2 else Fidelity.HIGH,
                    Origin.EXCHANGED if i % 2 else Origin.DOE,
                )
            )
        path = tmp_path / "ds.csv"
        ds.to_csv(path)
        back = Dataset.from_csv(path)
        assert len(back) == len(ds)
        for a, b in zip(ds.samples, back.samples):
            assert np.array_equal(a.x, b.x)
            assert a.y == b.y
            assert a.fidelity is b.fidelity and a.origin is b.origin


class TestLhs:
    def test_exact_stratification_sampled_cases(self):
        # every 1-D projection puts exactly one point in each of n bins
        for n, d, seed in [(2, 1, 0), (7, 3, 1), (20, 6, 2), (50, 2, 3)]:
            b = Bounds(-np.ones(d) * 2, np.ones(d) * 3)
            X = lhs_sample(n, b, RngSeed(seed))
            unit = (X - b.lower) / b.width
            bins = np.floor(unit * n).astype(int)
            bins = np.clip(bins, 0, n - 1)
            for j in range(d):
                assert sorted(bins[:, j]) == list(range(n))

    def test_determinism(self):
        b = Bounds.symmetric_unit(4)
        assert np.array_equal(lhs_sample(9, b, RngSeed(5)), lhs_sample(9, b, RngSeed(5)))

    def test_single_point(self):
        X = lhs_sample(1, Bounds([0.0], [1.0]), RngSeed(0))
        assert X.shape == (1, 1) and 0.0 <= X[0, 0] <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            lhs_sample(0, Bounds.symmetric_unit(1), RngSeed(0))
        with pytest.raises(ValueError):
            lhs_sample(3, [(0, 1)], RngSeed(0))


class TestStandardize:
    def test_moments_and_inverse(self):
        ys = np.array([1.0, 4.0, -2.0, 3.5, 0.0])
        z, mean, std = standardize_outputs(ys)
        assert abs(np.mean(z)) < 1e-12
        assert abs(np.std(z) - 1.0) < 1e-12
        assert np.allclose(z * std + mean, ys)

    def test_constant_inputs(self):
        z, mean, std = standardize_outputs(np.full(4, 2.5))
        assert std == 1e-12
        assert np.all(np.isfinite(z))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            standardize_outputs([])
