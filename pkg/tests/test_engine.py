"""Run loops: exchange, narrowed box, budgets, logs, and determinism."""

import json

import numpy as np
import pytest

from gmfoo import (
    Bounds,
    Dataset,
    Fidelity,
    GmfooConfig,
    Layer,
    Network,
    Origin,
    Problem,
    RngSeed,
    RunAborted,
    RunLog,
    Sample,
    embed_low_to_high,
    exchange_samples,
    forward,
    fourier_pair,
    narrowed_box,
    run_comparison,
    run_gmfoo,
    run_standard_bo,
    summarize_logs,
)
from gmfoo.engine import _fresh_point
from gmfoo.latent import LatentSpacePair


def fast_config(**kw):
    """Small surrogate budgets; structural behaviour is unaffected."""
    base = dict(budget=20, seed=RngSeed(0), ei_restarts=4, fit_starts=2, fit_max_evals=40)
    base.update(kw)
    return GmfooConfig(**base)


def identity_pair(d_high=3, d_low=2):
    gen = Network(d_high, d_high, (Layer(np.eye(d_high), np.zeros(d_high), "identity"),))
    enc = Network(
        d_high, d_low, (Layer(np.eye(d_low, d_high), np.zeros(d_low), "identity"),)
    )
    return LatentSpacePair(d_high, d_low, gen, enc)


class TestNarrowedBox:
    def test_worked_example(self):
        box = narrowed_box([0.2], 0.15, Bounds.symmetric_unit(3), 3)
        assert np.allclose(box.lower, [0.05, -0.15, -0.15], atol=1e-15)
        assert np.allclose(box.upper, [0.35, 0.15, 0.15], atol=1e-15)

    def test_clipped_at_boundary(self):
        box = narrowed_box([0.95], 0.15, Bounds.symmetric_unit(2), 2)
        assert np.allclose(box.lower, [0.8, -0.15], atol=1e-15)
        assert np.allclose(box.upper, [1.0, 0.15], atol=1e-15)

    def test_zero_delta_is_a_point(self):
        box = narrowed_box([0.3, -0.4], 0.0, Bounds.symmetric_unit(4), 4)
        assert np.array_equal(box.lower, box.upper)
        assert np.array_equal(box.lower, [0.3, -0.4, 0.0, 0.0])

    def test_respects_asymmetric_widths(self):
        bounds = Bounds([0.0, -2.0], [1.0, 2.0])
        box = narrowed_box([0.5], 0.1, bounds, 2)
        # half-widths are 0.1 * range / 2 = 0.05 and 0.2
        assert np.allclose(box.lower, [0.45, -0.2], atol=1e-15)
        assert np.allclose(box.upper, [0.55, 0.2], atol=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            narrowed_box([0.1, 0.2, 0.3], 0.15, Bounds.symmetric_unit(3), 3)
        with pytest.raises(ValueError):
            narrowed_box([0.1], -0.1, Bounds.symmetric_unit(3), 3)


class TestExchange:
    def make_datasets(self, pair):
        high = Dataset(pair.d_high, pair.bounds_high)
        high.append(Sample([0.5, 0.1, -0.2], 3.0, Fidelity.HIGH, Origin.DOE))
        high.append(Sample([-0.4, 0.6, 0.9], 1.0, Fidelity.HIGH, Origin.EI_QUERY))
        low = Dataset(pair.d_low, pair.bounds_low)
        low.append(Sample([0.2, 0.3], 2.0, Fidelity.HIGH, Origin.DOE))
        low.append(Sample([-0.7, 0.0], 0.5, Fidelity.HIGH, Origin.DOE))
        return high, low

    def test_directions_and_values(self):
        pair = identity_pair()
        high, low = self.make_datasets(pair)
        kb = exchange_samples(high, low, pair)
        X_hi, y_hi = kb.exchanged_to_high.arrays()
        assert np.array_equal(X_hi, [[0.2, 0.3, 0.0], [-0.7, 0.0, 0.0]])
        assert np.array_equal(y_hi, [2.0, 0.5])
        X_lo, y_lo = kb.exchanged_to_low.arrays()
        # identity encoder keeps the leading coordinates
        assert np.array_equal(X_lo, [[0.5, 0.1], [-0.4, 0.6]])
        assert np.array_equal(y_lo, [3.0, 1.0])
        assert kb.best_low.y == 0.5
        for s in kb.exchanged_to_high.samples + kb.exchanged_to_low.samples:
            assert s.origin is Origin.EXCHANGED
            assert s.fidelity is Fidelity.LOW

    def test_exact_fidelity_applies_to_embeds_only(self):
        pair = identity_pair()
        high, low = self.make_datasets(pair)
        kb = exchange_samples(high, low, pair, exact_fidelity=True)
        assert all(s.fidelity is Fidelity.HIGH for s in kb.exchanged_to_high.samples)
        assert all(s.fidelity is Fidelity.LOW for s in kb.exchanged_to_low.samples)

    def test_projection_duplicates_skipped(self):
        pair = identity_pair()
        high = Dataset(pair.d_high, pair.bounds_high)
        # differ only in the coordinate the projection discards
        high.append(Sample([0.5, 0.1, -0.2], 3.0, Fidelity.HIGH, Origin.DOE))
        high.append(Sample([0.5, 0.1, 0.8], 2.5, Fidelity.HIGH, Origin.DOE))
        low = Dataset(pair.d_low, pair.bounds_low)
        low.append(Sample([0.0, 0.0], 1.0, Fidelity.HIGH, Origin.DOE))
        kb = exchange_samples(high, low, pair)
        assert len(kb.exchanged_to_low.samples) == 1
        assert kb.exchanged_to_low.samples[0].y == 3.0

    def test_low_fidelity_rows_not_recycled(self):
        pair = identity_pair()
        high, low = self.make_datasets(pair)
        low.append(Sample([0.9, 0.9], -5.0, Fidelity.LOW, Origin.EXCHANGED))
        kb = exchange_samples(high, low, pair)
        assert len(kb.exchanged_to_high.samples) == 2
        assert kb.best_low.y == 0.5

    def test_embedded_values_are_exact_for_shared_generator(self):
        # g([c, 0]) is the same design the low space evaluated, so the
        # carried value equals a fresh high-space measurement
        pair, problem = fourier_pair(16, 4, 2)
        low = Dataset(2, pair.bounds_low)
        c = np.array([0.3, -0.6])
        y = problem(forward(pair.generator, embed_low_to_high(c, 4)))
        low.append(Sample(c, y, Fidelity.HIGH, Origin.DOE))
        kb = exchange_samples(Dataset(4, pair.bounds_high), low, pair)
        s = kb.exchanged_to_high.samples[0]
        assert problem(forward(pair.generator, s.x)) == s.y


class TestFreshPoint:
    def test_passthrough_when_unseen(self):
        ds = Dataset(2, Bounds.symmetric_unit(2))
        x = np.array([0.1, 0.2])
        assert _fresh_point(x, ds, Bounds.symmetric_unit(2), RngSeed(0)) is x

    def test_redraws_on_duplicate(self):
        box = Bounds.symmetric_unit(2)
        ds = Dataset(2, box)
        x = np.array([0.1, 0.2])
        ds.append(Sample(x, 1.0, Fidelity.HIGH, Origin.DOE))
        fresh = _fresh_point(x, ds, box, RngSeed(0))
        assert not np.array_equal(fresh, x)
        assert box.contains(fresh)


def quadratic_problem(d=1, name="quad"):
    return Problem(name, d, lambda x: float(np.sum((x - 0.3) ** 2)))


class TestStandardBo:
    def test_budget_equal_to_doe(self):
        log = run_standard_bo(
            quadratic_problem(),
            Bounds.symmetric_unit(1),
            lambda x: x,
            fast_config(budget=5),
            doe_size=5,
        )
        assert log.evaluations == 5
        assert all(r.subtask == "doe" and r.iteration == 0 for r in log.records)

    def test_converges_on_quadratic(self):
        log = run_standard_bo(
            quadratic_problem(),
            Bounds.symmetric_unit(1),
            lambda x: x,
            fast_config(budget=20),
            doe_size=5,
        )
        assert log.evaluations == 20
        assert log.final_best < 1e-2

    def test_best_so_far_is_running_minimum(self):
        log = run_standard_bo(
            quadratic_problem(2),
            Bounds.symmetric_unit(2),
            lambda x: x,
            fast_config(budget=12),
            doe_size=6,
        )
        ys = [r.y for r in log.records]
        assert np.array_equal(log.best_so_far_series(), np.minimum.accumulate(ys))

    def test_determinism(self):
        args = (quadratic_problem(), Bounds.symmetric_unit(1), lambda x: x)
        a = run_standard_bo(*args, fast_config(budget=10), doe_size=4)
        b = run_standard_bo(*args, fast_config(budget=10), doe_size=4)
        assert a.to_json_bytes() == b.to_json_bytes()

    def test_budget_below_doe_rejected(self):
        with pytest.raises(ValueError):
            run_standard_bo(
                quadratic_problem(),
                Bounds.symmetric_unit(1),
                lambda x: x,
                fast_config(budget=3),
                doe_size=5,
            )

    def test_failure_preserves_partial_log(self):
        calls = {"n": 0}

        def flaky(x):
            calls["n"] += 1
            if calls["n"] >= 7:
                raise ValueError("sensor dropout")
            return float(np.sum(x**2))

        with pytest.raises(RunAborted) as info:
            run_standard_bo(
                Problem("flaky", 1, flaky),
                Bounds.symmetric_unit(1),
                lambda x: x,
                fast_config(budget=10),
                doe_size=4,
            )
        assert info.value.log.evaluations == 6
        assert "sensor dropout" in str(info.value)


def subtask_counts(log):
    counts = {}
    for r in log.records:
        counts[r.subtask] = counts.get(r.subtask, 0) + 1
    return counts


class TestGmfooLoop:
    def run_small(self, budget, delta=0.15, seed=0):
        pair, problem = fourier_pair(16, 6, 2)
        cfg = fast_config(budget=budget, seed=RngSeed(seed), delta=delta, doe_size_low=8)
        return run_gmfoo(problem, pair, cfg)

    def test_three_evaluations_per_iteration(self):
        log = self.run_small(budget=17)
        counts = subtask_counts(log)
        assert counts == {"doe-high": 4, "doe-low": 4, "high": 3, "low": 3, "narrowed": 3}
        assert log.evaluations == 17

    def test_two_evaluations_when_delta_zero(self):
        log = self.run_small(budget=14, delta=0.0)
        counts = subtask_counts(log)
        assert counts == {"doe-high": 4, "doe-low": 4, "high": 3, "low": 3}
        assert "narrowed" not in counts

    def test_partial_final_iteration(self):
        log = self.run_small(budget=16)
        assert log.evaluations == 16
        last_iter = [r.subtask for r in log.records if r.iteration == 3]
        assert last_iter == ["high", "low"]

    def test_narrowed_queries_stay_in_their_box(self):
        log = self.run_small(budget=20)
        pair, _ = fourier_pair(16, 6, 2)
        narrowed = [r for r in log.records if r.subtask == "narrowed"]
        assert narrowed
        for r in narrowed:
            assert r.box_lower is not None
            assert np.all(r.x >= r.box_lower - 1e-12)
            assert np.all(r.x <= r.box_upper + 1e-12)
            assert np.all(r.box_lower >= pair.bounds_high.lower - 1e-12)
            assert np.all(r.box_upper <= pair.bounds_high.upper + 1e-12)

    def test_narrowed_box_centers_on_low_incumbent(self):
        log = self.run_small(budget=20)
        pair, _ = fourier_pair(16, 6, 2)
        for r in log.records:
            if r.subtask != "narrowed":
                continue
            prior_low = [
                p
                for p in log.records
                if p.subtask in ("doe-low", "low")
                and (p.iteration, p.subtask) <= (r.iteration, "low")
            ]
            c_min = min(prior_low, key=lambda p: p.y).x
            expected = narrowed_box(c_min, 0.15, pair.bounds_high, 6)
            assert np.allclose(r.box_lower, expected.lower, atol=1e-12)
            assert np.allclose(r.box_upper, expected.upper, atol=1e-12)

    def test_non_doe_records_carry_positive_iterations(self):
        log = self.run_small(budget=17)
        for r in log.records:
            if r.subtask.startswith("doe"):
                assert r.iteration == 0
            else:
                assert r.iteration >= 1

    def test_determinism_bytes(self):
        a = self.run_small(budget=17, seed=5)
        b = self.run_small(budget=17, seed=5)
        assert a.to_json_bytes() == b.to_json_bytes()

    def test_budget_must_cover_doe_and_one_iteration(self):
        with pytest.raises(ValueError):
            self.run_small(budget=10)


class TestComparison:
    def setup_runs(self):
        pair, problem = fourier_pair(16, 6, 2)
        cfg = fast_config(budget=9, doe_size_low=6)
        # a 3-wide decoder built from the pair's own leading modes
        W = pair.generator.layers[0].weights[:, :3]
        svd = Network(3, 16, (Layer(W, np.zeros(16), "identity"),))
        logs = run_comparison(
            problem,
            pair,
            ["gmo-low", "random-search", "svd-bo"],
            [0, 1],
            cfg,
            svd_generator=svd,
        )
        return logs

    def test_algorithm_major_order_and_budgets(self):
        logs = self.setup_runs()
        assert [lg.algorithm for lg in logs] == [
            "gmo-low", "gmo-low", "random-search", "random-search", "svd-bo", "svd-bo",
        ]
        assert all(lg.evaluations == 9 for lg in logs)

    def test_shared_doe_size(self):
        logs = self.setup_runs()
        for lg in logs:
            if lg.algorithm in ("gmo-low", "svd-bo"):
                assert sum(1 for r in lg.records if r.subtask == "doe") == 6

    def test_random_search_is_running_min_of_uniform_draws(self):
        logs = self.setup_runs()
        rnd = [lg for lg in logs if lg.algorithm == "random-search"]
        for lg in rnd:
            assert all(r.subtask == "random" for r in lg.records)
            ys = [r.y for r in lg.records]
            assert np.array_equal(lg.best_so_far_series(), np.minimum.accumulate(ys))

    def test_per_run_seeds_derived_from_algorithm(self):
        logs = self.setup_runs()
        for lg in logs:
            original = 0 if lg is logs[0] or logs.index(lg) % 2 == 0 else 1
            assert lg.seed == RngSeed(original).derive(lg.algorithm).seed

    def test_seeds_produce_distinct_runs(self):
        logs = self.setup_runs()
        a, b = logs[2], logs[3]  # random-search seeds 0 and 1
        assert not np.array_equal(a.records[0].x, b.records[0].x)

    def test_unknown_algorithm_rejected(self):
        pair, problem = fourier_pair(16, 6, 2)
        with pytest.raises(ValueError, match="annealing"):
            run_comparison(problem, pair, ["annealing"], [0], fast_config(budget=9))

    def test_svd_requires_generator(self):
        pair, problem = fourier_pair(16, 6, 2)
        with pytest.raises(ValueError, match="svd"):
            run_comparison(problem, pair, ["svd-bo"], [0], fast_config(budget=9))

    def test_summary_matches_recomputation(self):
        logs = self.setup_runs()
        rows = summarize_logs(logs)
        assert [r["algorithm"] for r in rows] == ["gmo-low", "random-search", "svd-bo"]
        for row in rows:
            finals = [lg.final_best for lg in logs if lg.algorithm == row["algorithm"]]
            assert row["runs"] == len(finals)
            assert row["median_final_best"] == float(np.median(finals))
            assert row["min_final_best"] == min(finals)
            assert row["max_final_best"] == max(finals)


class TestRunLog:
    def test_record_tracks_running_minimum(self):
        log = RunLog("x", "p", 0, {})
        for y in [3.0, 1.0, 2.0]:
            log.record(0, "doe", [0.0], y)
        assert [r.best_so_far for r in log.records] == [3.0, 1.0, 1.0]
        assert log.final_best == 1.0

    def test_final_best_requires_records(self):
        with pytest.raises(ValueError):
            RunLog("x", "p", 0, {}).final_best

    def test_json_round_trip(self):
        log = RunLog("gmfoo", "quad", 7, {"budget": 3})
        log.record(0, "doe-high", [0.1, 0.2], 5.0)
        log.record(1, "narrowed", [0.5, 0.5], 4.0, box=Bounds([0.0, 0.0], [1.0, 1.0]))
        clone = RunLog.from_json(log.to_json())
        assert clone.to_json() == log.to_json()
        assert clone.records[1].box_lower is not None
        assert np.array_equal(clone.records[1].x, log.records[1].x)

    def test_json_is_canonical(self):
        log = RunLog("gmfoo", "quad", 7, {"b": 1, "a": 2})
        text = log.to_json()
        assert " " not in text
        blob = json.loads(text)
        assert list(blob) == sorted(blob)
        assert log.to_json_bytes() == text.encode("utf-8")

    def test_csv_uses_repr_floats(self):
        log = RunLog("x", "p", 0, {})
        log.record(0, "doe", [0.0], 0.1)
        log.record(1, "ei", [0.0], 1 / 3)
        lines = log.to_csv().splitlines()
        assert lines[0] == "iteration,subtask,y,best_so_far"
        assert lines[1] == "0,doe,0.1,0.1"
        assert lines[2] == f"1,ei,{(1 / 3)!r},0.1"
