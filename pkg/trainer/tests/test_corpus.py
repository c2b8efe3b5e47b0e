"""Synthetic image corpus and CSV curve loading."""

import numpy as np
import pytest

from gmfoo_trainer import DataError, disc_images, load_curve_corpus


class TestDiscImages:
    def test_shape_and_range(self):
        X = disc_images(40, seed=0)
        assert X.shape == (40, 784)
        assert X.min() >= 0.0 and X.max() <= 1.0

    def test_deterministic_per_seed(self):
        assert np.array_equal(disc_images(10, seed=3), disc_images(10, seed=3))
        assert not np.array_equal(disc_images(10, seed=3), disc_images(10, seed=4))

    def test_area_is_the_dominant_factor(self):
        # thresholding at 0.5 recovers the disc support, whose pixel count
        # spans roughly pi * 3^2 through pi * 10^2
        X = disc_images(200, seed=1)
        areas = (X > 0.5).sum(axis=1)
        assert areas.min() >= 10 and areas.max() <= 360
        assert areas.max() - areas.min() > 150

    def test_rejects_empty_request(self):
        with pytest.raises(DataError):
            disc_images(0, seed=0)


class TestCurveCorpus:
    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "curves.csv")
        X = np.random.default_rng(0).uniform(-1.0, 1.0, (12, 5))
        np.savetxt(path, X, delimiter=",")
        assert np.allclose(load_curve_corpus(path), X, rtol=0, atol=1e-12)

    def test_single_row_stays_2d(self, tmp_path):
        path = str(tmp_path / "one.csv")
        np.savetxt(path, np.arange(4.0)[None, :], delimiter=",")
        assert load_curve_corpus(path).shape == (1, 4)

    def test_rejects_missing_and_malformed(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_curve_corpus(str(tmp_path / "absent.csv"))
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\noops,4.0\n")
        with pytest.raises(DataError, match="numeric"):
            load_curve_corpus(str(bad))

    def test_rejects_nonfinite_and_wrong_width(self, tmp_path):
        path = str(tmp_path / "nan.csv")
        np.savetxt(path, np.array([[1.0, np.nan]]), delimiter=",")
        with pytest.raises(DataError, match="finite"):
            load_curve_corpus(path)
        ok = str(tmp_path / "ok.csv")
        np.savetxt(ok, np.ones((3, 4)), delimiter=",")
        with pytest.raises(DataError, match="expected 6"):
            load_curve_corpus(ok, expected_dim=6)
