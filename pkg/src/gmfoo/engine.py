"""Optimization loops over one latent space or the coupled pair.

``run_standard_bo`` is plain EI-driven Bayesian optimization in a single
box. ``run_gmfoo`` runs two coordinated sub-tasks, one per latent space,
that exchange evaluated samples through a knowledge base every iteration:
each space's surrogate treats the other space's transformed samples as
low-fidelity data, and an extra exploitation query searches a narrowed
high-space box around the embedded low-space incumbent.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from gmfoo.acquisition import maximize_ei
from gmfoo.core import Bounds, Dataset, Fidelity, Origin, RngSeed, Sample, lhs_sample
from gmfoo.errors import GmfooError
from gmfoo.latent import embed_low_to_high, forward, project_high_to_low
from gmfoo.surrogate import fit_gp, fit_mfgp

ALGORITHMS = ("gmfoo", "gmo-high", "gmo-low", "svd-bo", "random-search")


class RunAborted(GmfooError):
    """A run failed mid-flight; ``log`` holds everything evaluated so far."""

    def __init__(self, message, log):
        super().__init__(message)
        self.log = log


@dataclass(frozen=True)
class GmfooConfig:
    """Settings shared by all run entry points.

    ``doe_size_low`` is the total initial-design size; when unset it
    defaults to 11 times the low-space dimension, and the two-space loop
    splits it into halves across the spaces. ``delta`` is the narrowed-box
    half-width as a fraction of the high box's half-range; 0 disables the
    narrowed query.
    """

    budget: int
    seed: RngSeed
    delta: float = 0.15
    doe_size_low: int = None
    ei_restarts: int = 8
    fit_starts: int = 5
    fit_max_evals: int = 200
    warm_start_fits: bool = True
    exchange_exact_fidelity: bool = False

    def __post_init__(self):
        if not isinstance(self.seed, RngSeed):
            object.__setattr__(self, "seed", RngSeed(int(self.seed)))
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if self.doe_size_low is not None and self.doe_size_low < 1:
            raise ValueError("doe_size_low must be positive when given")
        if self.ei_restarts < 1 or self.fit_starts < 1 or self.fit_max_evals < 1:
            raise ValueError("search budgets must be positive")

    def doe_total(self, d_low):
        return self.doe_size_low if self.doe_size_low is not None else 11 * d_low

    def to_dict(self):
        return {
            "budget": self.budget,
            "seed": self.seed.seed,
            "delta": self.delta,
            "doe_size_low": self.doe_size_low,
            "ei_restarts": self.ei_restarts,
            "fit_starts": self.fit_starts,
            "fit_max_evals": self.fit_max_evals,
            "warm_start_fits": self.warm_start_fits,
            "exchange_exact_fidelity": self.exchange_exact_fidelity,
        }


@dataclass(frozen=True)
class RunRecord:
    """One objective evaluation as it entered the log."""

    iteration: int
    subtask: str
    x: np.ndarray
    y: float
    best_so_far: float
    box_lower: np.ndarray = None
    box_upper: np.ndarray = None

    def to_dict(self):
        blob = {
            "iteration": self.iteration,
            "subtask": self.subtask,
            "x": [float(v) for v in self.x],
            "y": float(self.y),
            "best_so_far": float(self.best_so_far),
        }
        if self.box_lower is not None:
            blob["box_lower"] = [float(v) for v in self.box_lower]
            blob["box_upper"] = [float(v) for v in self.box_upper]
        return blob


@dataclass
class RunLog:
    """Complete evaluation history of one run.

    ``wall_times`` (seconds per iteration) stay in memory only; the JSON
    form is canonical and byte-stable across reruns, so timing is excluded.
    """

    algorithm: str
    problem: str
    seed: int
    config: dict
    records: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)

    @property
    def evaluations(self):
        return len(self.records)

    @property
    def final_best(self):
        if not self.records:
            raise ValueError("empty run log has no best value")
        return self.records[-1].best_so_far

    def best_so_far_series(self):
        return np.array([r.best_so_far for r in self.records])

    def record(self, iteration, subtask, x, y, box=None):
        y = float(y)
        best = y if not self.records else min(self.records[-1].best_so_far, y)
        self.records.append(
            RunRecord(
                iteration,
                subtask,
                np.asarray(x, dtype=float).copy(),
                y,
                best,
                None if box is None else box.lower.copy(),
                None if box is None else box.upper.copy(),
            )
        )

    def to_json(self):
        blob = {
            "algorithm": self.algorithm,
            "problem": self.problem,
            "seed": self.seed,
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
        }
        return json.dumps(blob, sort_keys=True, separators=(",", ":"))

    def to_json_bytes(self):
        return self.to_json().encode("utf-8")

    @classmethod
    def from_json(cls, text):
        blob = json.loads(text)
        log = cls(blob["algorithm"], blob["problem"], blob["seed"], blob["config"])
        for r in blob["records"]:
            box_lower = r.get("box_lower")
            log.records.append(
                RunRecord(
                    r["iteration"],
                    r["subtask"],
                    np.array(r["x"], dtype=float),
                    r["y"],
                    r["best_so_far"],
                    None if box_lower is None else np.array(box_lower),
                    None if box_lower is None else np.array(r["box_upper"]),
                )
            )
        return log

    def to_csv(self):
        lines = ["iteration,subtask,y,best_so_far"]
        lines += [
            f"{r.iteration},{r.subtask},{r.y!r},{r.best_so_far!r}" for r in self.records
        ]
        return "\n".join(lines) + "\n"


@dataclass
class KnowledgeBase:
    """Cross-space exchange state rebuilt after every iteration."""

    best_low: Sample
    exchanged_to_high: Dataset
    exchanged_to_low: Dataset


class _Tracker:
    """Budget-guarded objective evaluation feeding the run log."""

    def __init__(self, problem, budget, log):
        self.problem = problem
        self.budget = budget
        self.log = log

    @property
    def evaluations(self):
        return self.log.evaluations

    @property
    def exhausted(self):
        return self.evaluations >= self.budget

    def evaluate(self, x, decode, iteration, subtask, box=None):
        if self.exhausted:
            raise GmfooError("evaluation budget exhausted")
        y = float(self.problem(decode(x)))
        self.log.record(iteration, subtask, x, y, box=box)
        return y


def _fresh_point(x, ds, box, seed):
    """Fall back to a random in-box point if x duplicates a High sample."""
    if not ds.contains_point(x, fidelity=Fidelity.HIGH):
        return x
    rng = seed.generator()
    for _ in range(100):
        cand = rng.uniform(box.lower, box.upper, box.dimension)
        if not ds.contains_point(cand, fidelity=Fidelity.HIGH):
            return cand
    raise GmfooError("could not find an unseen query point in the box")


def narrowed_box(c_min, delta, bounds_high, d_high):
    """High-space exploitation box around the embedded low incumbent.

    Centered at [c_min, 0, ..., 0] with per-dimension half-width
    delta * (range / 2), intersected with the full bounds. delta = 0 yields
    the degenerate single-point box.
    """
    c_min = np.atleast_1d(np.asarray(c_min, dtype=float))
    if c_min.size >= d_high:
        raise ValueError("c_min must have fewer dimensions than the high space")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    center = embed_low_to_high(c_min, d_high)
    half = 0.5 * delta * bounds_high.width
    return Bounds(center - half, center + half).intersect(bounds_high)


def exchange_samples(high_ds, low_ds, pair, exact_fidelity=False):
    """Transform each space's evaluated samples into the other space.

    Low-space points (c, y) embed to ([c, 0...], y); high-space points
    (z, y) project to (encoder(generator(z)), y). Transformed samples carry
    fidelity Low (their y was measured elsewhere); with ``exact_fidelity``
    the embedded direction keeps fidelity High, since g([c, 0]) is the
    identical design. Duplicates within tolerance of an already exchanged
    point are skipped.
    """
    to_high = Dataset(pair.d_high, pair.bounds_high)
    to_low = Dataset(pair.d_low, pair.bounds_low)
    embed_fidelity = Fidelity.HIGH if exact_fidelity else Fidelity.LOW

    low_samples = low_ds.subset(Fidelity.HIGH)
    for s in low_samples:
        z = embed_low_to_high(s.x, pair.d_high)
        if not to_high.contains_point(z):
            to_high.append(Sample(z, s.y, embed_fidelity, Origin.EXCHANGED))

    high_samples = high_ds.subset(Fidelity.HIGH)
    if high_samples:
        Z = np.vstack([s.x for s in high_samples])
        C = project_high_to_low(Z, pair)
        for c, s in zip(C, high_samples):
            if not to_low.contains_point(c):
                to_low.append(Sample(c, s.y, Fidelity.LOW, Origin.EXCHANGED))

    return KnowledgeBase(low_ds.best(Fidelity.HIGH), to_high, to_low)


def _space_training_data(own_ds, exchanged):
    """(high-block, low-block) arrays for one space's surrogate fit."""
    X_own, y_own = own_ds.arrays(Fidelity.HIGH)
    X_ex_hi, y_ex_hi = exchanged.arrays(Fidelity.HIGH)
    X_lo, y_lo = exchanged.arrays(Fidelity.LOW)
    if len(y_ex_hi):
        keep = [
            i
            for i in range(len(y_ex_hi))
            if not own_ds.contains_point(X_ex_hi[i], fidelity=Fidelity.HIGH)
        ]
        X_own = np.vstack([X_own, X_ex_hi[keep]])
        y_own = np.concatenate([y_own, y_ex_hi[keep]])
    return (X_own, y_own), (X_lo, y_lo)


def _space_f_min(own_ds, exchanged):
    """Incumbent for EI: best over own High values and exchanged values."""
    values = [s.y for s in own_ds.subset(Fidelity.HIGH)]
    values += [s.y for s in exchanged.samples]
    return float(min(values))


def _finish(log, t0):
    log.wall_times.append(time.perf_counter() - t0)


def run_standard_bo(problem, bounds, decode, config, doe_size=None, algorithm="bo"):
    """Single-space Bayesian optimization: LHS design, then EI queries.

    ``decode`` maps a latent point to the problem's design vector (identity
    for direct searches). ``doe_size`` defaults to the config's DoE setting
    or 11 per dimension. The log contains exactly ``config.budget`` records.
    """
    if doe_size is None:
        doe_size = (
            config.doe_size_low
            if config.doe_size_low is not None
            else 11 * bounds.dimension
        )
    if config.budget < doe_size:
        raise ValueError("budget must cover the initial design")
    seed = config.seed
    log = RunLog(algorithm, problem.name, seed.seed, config.to_dict())
    tracker = _Tracker(problem, config.budget, log)
    ds = Dataset(bounds.dimension, bounds)
    try:
        for x in lhs_sample(doe_size, bounds, seed.derive("doe", algorithm)):
            y = tracker.evaluate(x, decode, 0, "doe")
            ds.append(Sample(x, y, Fidelity.HIGH, Origin.DOE))
        iteration = 0
        warm = None
        while not tracker.exhausted:
            iteration += 1
            t0 = time.perf_counter()
            X, yv = ds.arrays(Fidelity.HIGH)
            model = fit_gp(
                X,
                yv,
                seed.derive("fit", algorithm, iteration),
                n_starts=config.fit_starts,
                max_evals_per_start=config.fit_max_evals,
                warm_start=warm,
            )
            if config.warm_start_fits:
                warm = model.params
            query = maximize_ei(
                model,
                bounds,
                float(np.min(yv)),
                seed.derive("ei", algorithm, iteration),
                restarts=config.ei_restarts,
            )
            x = _fresh_point(query.x, ds, bounds, seed.derive("fresh", algorithm, iteration))
            y = tracker.evaluate(x, decode, iteration, "ei")
            ds.append(Sample(x, y, Fidelity.HIGH, Origin.EI_QUERY))
            _finish(log, t0)
    except Exception as exc:
        raise RunAborted(f"{algorithm} run aborted: {exc}", log) from exc
    return log


def _run_random_search(problem, bounds, decode, config, algorithm="random-search"):
    log = RunLog(algorithm, problem.name, config.seed.seed, config.to_dict())
    tracker = _Tracker(problem, config.budget, log)
    rng = config.seed.derive("random", algorithm).generator()
    try:
        for i in range(config.budget):
            x = rng.uniform(bounds.lower, bounds.upper, bounds.dimension)
            tracker.evaluate(x, decode, i + 1, "random")
    except Exception as exc:
        raise RunAborted(f"{algorithm} run aborted: {exc}", log) from exc
    return log


def run_gmfoo(problem, pair, config):
    """Coupled two-space optimization with exchange and narrowed queries.

    Per iteration: fit the high-space surrogate on its High samples plus
    exchanged Low samples and take one EI query; same for the low space;
    then, when delta > 0, one extra EI query inside the narrowed box around
    the updated low incumbent, scored by the high-space surrogate; finally
    rebuild the knowledge base. Stops exactly at the evaluation budget.
    """
    d_high, d_low = pair.d_high, pair.d_low
    doe_total = config.doe_total(d_low)
    if config.budget < doe_total + 3:
        raise ValueError("budget must cover the initial design plus one iteration")
    doe_high = math.ceil(doe_total / 2)
    doe_low = doe_total - doe_high
    seed = config.seed

    def decode_high(z):
        return forward(pair.generator, z)

    def decode_low(c):
        return forward(pair.generator, embed_low_to_high(c, d_high))

    log = RunLog("gmfoo", problem.name, seed.seed, config.to_dict())
    tracker = _Tracker(problem, config.budget, log)
    high_ds = Dataset(d_high, pair.bounds_high)
    low_ds = Dataset(d_low, pair.bounds_low)
    try:
        for x in lhs_sample(doe_high, pair.bounds_high, seed.derive("doe", "high")):
            y = tracker.evaluate(x, decode_high, 0, "doe-high")
            high_ds.append(Sample(x, y, Fidelity.HIGH, Origin.DOE))
        for x in lhs_sample(doe_low, pair.bounds_low, seed.derive("doe", "low")):
            y = tracker.evaluate(x, decode_low, 0, "doe-low")
            low_ds.append(Sample(x, y, Fidelity.HIGH, Origin.DOE))
        kb = exchange_samples(high_ds, low_ds, pair, config.exchange_exact_fidelity)

        iteration = 0
        warm_high = warm_low = None
        while not tracker.exhausted:
            iteration += 1
            t0 = time.perf_counter()

            hi_blocks = _space_training_data(high_ds, kb.exchanged_to_high)
            model_high = fit_mfgp(
                hi_blocks[0],
                hi_blocks[1],
                seed.derive("fit", "high", iteration),
                n_starts=config.fit_starts,
                max_evals_per_start=config.fit_max_evals,
                warm_start=warm_high,
            )
            if config.warm_start_fits:
                warm_high = model_high.params
            query = maximize_ei(
                model_high,
                pair.bounds_high,
                _space_f_min(high_ds, kb.exchanged_to_high),
                seed.derive("ei", "high", iteration),
                restarts=config.ei_restarts,
            )
            x = _fresh_point(
                query.x, high_ds, pair.bounds_high, seed.derive("fresh", "high", iteration)
            )
            y = tracker.evaluate(x, decode_high, iteration, "high")
            high_ds.append(Sample(x, y, Fidelity.HIGH, Origin.EI_QUERY))
            if tracker.exhausted:
                _finish(log, t0)
                break

            lo_blocks = _space_training_data(low_ds, kb.exchanged_to_low)
            model_low = fit_mfgp(
                lo_blocks[0],
                lo_blocks[1],
                seed.derive("fit", "low", iteration),
                n_starts=config.fit_starts,
                max_evals_per_start=config.fit_max_evals,
                warm_start=warm_low,
            )
            if config.warm_start_fits:
                warm_low = model_low.params
            query = maximize_ei(
                model_low,
                pair.bounds_low,
                _space_f_min(low_ds, kb.exchanged_to_low),
                seed.derive("ei", "low", iteration),
                restarts=config.ei_restarts,
            )
            c = _fresh_point(
                query.x, low_ds, pair.bounds_low, seed.derive("fresh", "low", iteration)
            )
            y = tracker.evaluate(c, decode_low, iteration, "low")
            low_ds.append(Sample(c, y, Fidelity.HIGH, Origin.EI_QUERY))
            if tracker.exhausted:
                _finish(log, t0)
                break

            if config.delta > 0:
                c_min = low_ds.best(Fidelity.HIGH).x
                box = narrowed_box(c_min, config.delta, pair.bounds_high, d_high)
                query = maximize_ei(
                    model_high,
                    box,
                    _space_f_min(high_ds, kb.exchanged_to_high),
                    seed.derive("ei", "narrowed", iteration),
                    restarts=config.ei_restarts,
                )
                x = _fresh_point(
                    query.x, high_ds, box, seed.derive("fresh", "narrowed", iteration)
                )
                y = tracker.evaluate(x, decode_high, iteration, "narrowed", box=box)
                high_ds.append(Sample(x, y, Fidelity.HIGH, Origin.NARROWED_QUERY))

            kb = exchange_samples(high_ds, low_ds, pair, config.exchange_exact_fidelity)
            _finish(log, t0)
    except RunAborted:
        raise
    except Exception as exc:
        raise RunAborted(f"gmfoo run aborted: {exc}", log) from exc
    return log


def run_comparison(problem, pair, algorithms, seeds, config, svd_generator=None):
    """Run each named algorithm on each seed with matched budgets.

    Algorithms: gmfoo, gmo-high, gmo-low, svd-bo (needs ``svd_generator``),
    random-search. All use the same total DoE size (from the low dimension)
    and the same evaluation budget; per-run seeds derive from the integer
    seed and the algorithm name, so streams never couple across runs.
    Returns the logs in (algorithm-major, seed-minor) order.
    """
    for name in algorithms:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    if "svd-bo" in algorithms and svd_generator is None:
        raise ValueError("svd-bo requires an svd_generator network")
    doe_total = config.doe_total(pair.d_low)

    def decode_high(z):
        return forward(pair.generator, z)

    def decode_low(c):
        return forward(pair.generator, embed_low_to_high(c, pair.d_high))

    logs = []
    for name in algorithms:
        for s in seeds:
            cfg = replace(config, seed=RngSeed(int(s)).derive(name))
            if name == "gmfoo":
                logs.append(run_gmfoo(problem, pair, cfg))
            elif name == "gmo-high":
                logs.append(
                    run_standard_bo(
                        problem, pair.bounds_high, decode_high, cfg,
                        doe_size=doe_total, algorithm="gmo-high",
                    )
                )
            elif name == "gmo-low":
                logs.append(
                    run_standard_bo(
                        problem, pair.bounds_low, decode_low, cfg,
                        doe_size=doe_total, algorithm="gmo-low",
                    )
                )
            elif name == "svd-bo":
                svd_bounds = Bounds.symmetric_unit(svd_generator.input_dim)
                logs.append(
                    run_standard_bo(
                        problem,
                        svd_bounds,
                        lambda v: forward(svd_generator, v),
                        cfg,
                        doe_size=doe_total,
                        algorithm="svd-bo",
                    )
                )
            else:
                logs.append(
                    _run_random_search(problem, pair.bounds_high, decode_high, cfg)
                )
    return logs


def summarize_logs(logs):
    """Per-algorithm median/min/max of final best values, in first-seen order."""
    by_algorithm = {}
    for log in logs:
        by_algorithm.setdefault(log.algorithm, []).append(log.final_best)
    rows = []
    for name, finals in by_algorithm.items():
        arr = np.array(finals)
        rows.append(
            {
                "algorithm": name,
                "runs": len(finals),
                "median_final_best": float(np.median(arr)),
                "min_final_best": float(np.min(arr)),
                "max_final_best": float(np.max(arr)),
            }
        )
    return rows
