"""Command-line interface: validate configs, execute runs, run diagnostics.

Experiment recipes are TOML files (a JSON mirror with the same keys is
accepted). Outputs are one RunLog JSON + CSV per (algorithm, seed) plus a
summary CSV, all re-parseable by this package's own loaders.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from gmfoo.core import RngSeed
from gmfoo.engine import (
    ALGORITHMS,
    GmfooConfig,
    RunAborted,
    run_comparison,
    summarize_logs,
)
from gmfoo.errors import GmfooError
from gmfoo.latent import LatentSpacePair, correlation_report, load_network
from gmfoo.problems import area_objective, corbel_design_problem, fourier_pair, Problem

log = logging.getLogger("gmfoo")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class ConfigError(GmfooError):
    """Invalid experiment configuration; message lists keypath violations."""


def load_config(path):
    """Parse a TOML (or JSON) experiment config into a plain dict."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".json"):
        try:
            return json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        return tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc


@dataclass
class Experiment:
    """Fully resolved experiment: networks loaded, dimensions verified."""

    pair: LatentSpacePair
    problem: Problem
    config: GmfooConfig
    algorithms: list
    seeds: list
    out_dir: str
    svd_generator: object = None
    diagnose_n: int = 1000
    diagnose_seed: int = 0


def _require(cfg, section, key, errors, default=None, required=False):
    value = cfg.get(section, {}).get(key, default)
    if required and value is None:
        errors.append(f"{section}.{key}: required key is missing")
    return value


def build_experiment(cfg, out_override=None, seed_offset=0):
    """Resolve a config dict into an Experiment, or raise ConfigError."""
    errors = []
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a table/object")

    problem_name = _require(cfg, "problem", "name", errors, required=True)
    latent_kind = _require(cfg, "latent", "kind", errors, default="analytic")
    d_high = _require(cfg, "latent", "d_high", errors)
    d_low = _require(cfg, "latent", "d_low", errors)

    pair = problem = None
    if latent_kind == "analytic":
        D = _require(cfg, "problem", "d", errors, default=384)
        variant = {"fourier-quadratic": "quadratic", "fourier-corbel": "corbel"}.get(
            problem_name
        )
        if problem_name is not None and variant is None:
            errors.append(
                "problem.name: analytic latent supports fourier-quadratic or "
                f"fourier-corbel, got {problem_name!r}"
            )
        elif d_high is None or d_low is None:
            errors.append("latent.d_high and latent.d_low are required")
        else:
            try:
                pair, problem = fourier_pair(int(D), int(d_high), int(d_low), variant)
            except ValueError as exc:
                errors.append(f"latent: {exc}")
    elif latent_kind == "files":
        gen_path = _require(cfg, "latent", "generator", errors, required=True)
        enc_path = _require(cfg, "latent", "encoder", errors, required=True)
        generator = encoder = None
        for label, path in (("generator", gen_path), ("encoder", enc_path)):
            if path is not None and not os.path.exists(path):
                errors.append(f"latent.{label}: file not found: {path}")
        if not errors:
            try:
                generator = load_network(gen_path)
                encoder = load_network(enc_path)
                pair = LatentSpacePair(
                    generator.input_dim, encoder.output_dim, generator, encoder
                )
            except (GmfooError, ValueError) as exc:
                errors.append(f"latent: {exc}")
        if pair is not None and d_high is not None and pair.d_high != int(d_high):
            errors.append(
                f"latent.d_high: config says {d_high} but generator takes {pair.d_high}"
            )
        if pair is not None and d_low is not None and pair.d_low != int(d_low):
            errors.append(
                f"latent.d_low: config says {d_low} but encoder yields {pair.d_low}"
            )
        if pair is not None:
            problem = _file_pair_problem(problem_name, cfg, pair, errors)
    else:
        errors.append(f"latent.kind: expected 'analytic' or 'files', got {latent_kind!r}")

    algorithms = _require(cfg, "run", "algorithms", errors, default=["gmfoo"])
    seeds = _require(cfg, "run", "seeds", errors, required=True)
    budget = _require(cfg, "run", "budget", errors, required=True)
    if seeds is not None and not isinstance(seeds, list):
        errors.append("run.seeds: must be a list of integers")
        seeds = None
    if isinstance(seeds, list) and not seeds:
        errors.append("run.seeds: must be a non-empty list")
    if not isinstance(algorithms, list):
        errors.append("run.algorithms: must be a list of algorithm names")
        algorithms = []
    for name in algorithms:
        if name not in ALGORITHMS:
            errors.append(
                f"run.algorithms: unknown algorithm {name!r}; "
                f"expected one of {list(ALGORITHMS)}"
            )
    svd_generator = None
    svd_path = cfg.get("latent", {}).get("svd_generator")
    if svd_path is not None:
        if not os.path.exists(svd_path):
            errors.append(f"latent.svd_generator: file not found: {svd_path}")
        else:
            svd_generator = load_network(svd_path)
    if isinstance(algorithms, list) and "svd-bo" in algorithms and svd_generator is None:
        errors.append("run.algorithms: svd-bo requires latent.svd_generator")

    config = None
    if not errors:
        run = cfg.get("run", {})
        try:
            config = GmfooConfig(
                budget=int(budget),
                seed=RngSeed(0),  # replaced per run by run_comparison
                delta=float(run.get("delta", 0.15)),
                doe_size_low=run.get("doe_size_low"),
                ei_restarts=int(run.get("ei_restarts", 8)),
                fit_starts=int(run.get("fit_starts", 5)),
                fit_max_evals=int(run.get("fit_max_evals", 200)),
                warm_start_fits=bool(run.get("warm_start_fits", True)),
                exchange_exact_fidelity=bool(run.get("exchange_exact_fidelity", False)),
            )
            doe = config.doe_total(pair.d_low)
            if "gmfoo" in algorithms and config.budget < doe + 3:
                errors.append(
                    f"run.budget: {config.budget} cannot cover DoE {doe} plus one iteration"
                )
            elif config.budget < doe:
                errors.append(f"run.budget: {config.budget} below DoE size {doe}")
        except (ValueError, TypeError) as exc:
            errors.append(f"run: {exc}")

    diagnose_n = cfg.get("diagnose", {}).get("n", 1000)
    if diagnose_n is not None and int(diagnose_n) < 3:
        errors.append("diagnose.n: must be at least 3")

    if errors:
        raise ConfigError("\n".join(errors))

    out_dir = out_override or cfg.get("run", {}).get("out", "results")
    return Experiment(
        pair=pair,
        problem=problem,
        config=config,
        algorithms=list(algorithms),
        seeds=[int(s) + seed_offset for s in seeds],
        out_dir=out_dir,
        svd_generator=svd_generator,
        diagnose_n=int(diagnose_n),
        diagnose_seed=int(cfg.get("diagnose", {}).get("seed", 0)),
    )


def _file_pair_problem(problem_name, cfg, pair, errors):
    D = pair.design_dim
    if problem_name == "area":
        threshold = float(cfg.get("problem", {}).get("threshold", 0.5))
        if D != 784:
            errors.append(f"problem.name: area needs a 784-output generator, got {D}")
            return None
        return Problem("area", 784, lambda x: area_objective(x, threshold))
    if problem_name == "corbel":
        base = corbel_design_problem()
        if D != base.input_dim:
            errors.append(
                f"problem.name: corbel needs a {base.input_dim}-output generator, got {D}"
            )
            return None
        return base
    errors.append(
        f"problem.name: file-based latent supports 'area' or 'corbel', got {problem_name!r}"
    )
    return None


def cmd_validate(args):
    cfg = load_config(args.config)
    exp = build_experiment(cfg, args.out, args.seed_offset)
    doe = exp.config.doe_total(exp.pair.d_low)
    print(f"config: {args.config}")
    print(f"problem: {exp.problem.name} (design dimension {exp.problem.input_dim})")
    print(
        f"latent pair: d_high={exp.pair.d_high} d_low={exp.pair.d_low} "
        f"design_dim={exp.pair.design_dim}"
    )
    print(f"algorithms: {', '.join(exp.algorithms)}")
    print(f"seeds: {exp.seeds}")
    doe_note = "configured" if exp.config.doe_size_low is not None else "11 x d_low"
    print(f"budget: {exp.config.budget}, DoE size: {doe} ({doe_note})")
    print(f"delta: {exp.config.delta}, ei_restarts: {exp.config.ei_restarts}")
    print(f"output directory: {exp.out_dir}")
    if exp.svd_generator is not None:
        print(f"svd generator: input_dim={exp.svd_generator.input_dim}")
    print("ok")
    return EXIT_OK


def _execute_one(cfg, out_override, seed_offset, algorithm, seed):
    """Worker for one (algorithm, seed) run; returns serialized results."""
    exp = build_experiment(cfg, out_override, seed_offset)
    try:
        runlog = run_comparison(
            exp.problem, exp.pair, [algorithm], [seed], exp.config, exp.svd_generator
        )[0]
        error = None
    except RunAborted as exc:
        runlog, error = exc.log, str(exc.__cause__ or exc)
    final = runlog.records[-1].best_so_far if runlog.records else None
    return algorithm, seed, runlog.to_json(), runlog.to_csv(), final, error


def cmd_run(args):
    cfg = load_config(args.config)
    exp = build_experiment(cfg, args.out, args.seed_offset)
    os.makedirs(exp.out_dir, exist_ok=True)
    tasks = [(a, s) for a in exp.algorithms for s in exp.seeds]
    log.info("running %d (algorithm, seed) combinations", len(tasks))

    results = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_execute_one, cfg, args.out, args.seed_offset, a, s)
                for a, s in tasks
            ]
            results = [f.result() for f in futures]
    else:
        for a, s in tasks:
            log.info("running %s seed %d", a, s)
            results.append(_execute_one(cfg, args.out, args.seed_offset, a, s))

    finals = {}
    failures = {}
    for algorithm, seed, json_text, csv_text, final, error in results:
        stem = os.path.join(exp.out_dir, f"{algorithm}_{seed}")
        with open(f"{stem}.runlog.json", "w", encoding="utf-8") as fh:
            fh.write(json_text)
        with open(f"{stem}.runlog.csv", "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        if error is None:
            finals.setdefault(algorithm, []).append(final)
        else:
            failures.setdefault(algorithm, []).append((seed, error))
            log.error("%s seed %d failed: %s", algorithm, seed, error)

    _write_summary(exp, finals, failures)
    n_failed = sum(len(v) for v in failures.values())
    print(f"completed {len(tasks) - n_failed}/{len(tasks)} runs -> {exp.out_dir}")
    if n_failed == len(tasks):
        return EXIT_RUNTIME
    return EXIT_OK


def _write_summary(exp, finals, failures):
    path = os.path.join(exp.out_dir, "summary.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "algorithm",
                "runs",
                "failures",
                "median_final_best",
                "min_final_best",
                "max_final_best",
            ]
        )
        for algorithm in exp.algorithms:
            values = finals.get(algorithm, [])
            failed = len(failures.get(algorithm, []))
            if values:
                arr = np.array(values)
                writer.writerow(
                    [
                        algorithm,
                        len(values),
                        failed,
                        repr(float(np.median(arr))),
                        repr(float(np.min(arr))),
                        repr(float(np.max(arr))),
                    ]
                )
            else:
                writer.writerow([algorithm, 0, failed, "", "", ""])


def cmd_diagnose(args):
    cfg = load_config(args.config)
    exp = build_experiment(cfg, args.out, args.seed_offset)
    os.makedirs(exp.out_dir, exist_ok=True)
    report = correlation_report(
        exp.pair,
        exp.problem,
        exp.diagnose_n,
        RngSeed(exp.diagnose_seed).derive("diagnose"),
    )
    pairs_path = os.path.join(exp.out_dir, "diagnose_pairs.csv")
    report.to_csv(pairs_path)
    blob = {"n_pairs": report.n_pairs, "pearson": report.pearson}
    with open(os.path.join(exp.out_dir, "diagnose.json"), "w", encoding="utf-8") as fh:
        json.dump(blob, fh, sort_keys=True)
    print(f"pearson: {report.pearson:.6f} over {report.n_pairs} pairs")
    print(f"pairs written to {pairs_path}")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gmfoo",
        description="Multi-form Bayesian optimization over coupled latent spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in (
        ("validate", cmd_validate),
        ("run", cmd_run),
        ("diagnose", cmd_diagnose),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config (TOML or JSON)")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--jobs", type=int, default=1, help="parallel runs")
        p.add_argument("--seed-offset", type=int, default=0, help="added to every seed")
        p.set_defaults(handler=handler)
    return parser


def main(argv=None):
    level = os.environ.get("GMFOO_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
            level, logging.ERROR
        ),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GmfooError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
