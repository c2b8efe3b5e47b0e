"""
Two-space optimization, end to end
==================================

Run the coupled two-space optimizer against single-space baselines on a
small analytic problem and compare convergence. Budgets are tiny here so
the script finishes in a few seconds; the package's acceptance tests run
the full-size version.
"""

import numpy as np

from gmfoo import GmfooConfig, RngSeed, fourier_pair, run_comparison, summarize_logs

pair, problem = fourier_pair(D=64, d_high=8, d_low=2)
config = GmfooConfig(
    budget=40,
    seed=RngSeed(0),
    doe_size_low=16,  # shared initial design across every algorithm
    ei_restarts=4,
    fit_starts=2,
    fit_max_evals=60,
)

logs = run_comparison(
    problem, pair, ["gmfoo", "gmo-high", "gmo-low", "random-search"], [0, 1, 2], config
)

for row in summarize_logs(logs):
    print(
        f"{row['algorithm']:>14}: median {row['median_final_best']:.5f} "
        f"(min {row['min_final_best']:.5f}, max {row['max_final_best']:.5f})"
    )

# convergence traces: best-so-far at a few checkpoints of the budget
print("\nbest-so-far, seed 0")
print("evals:        10       20       30       40")
for algorithm in ("gmfoo", "gmo-high", "gmo-low", "random-search"):
    log = next(l for l in logs if l.algorithm == algorithm and l.seed == RngSeed(0).derive(algorithm).seed)
    series = log.best_so_far_series()
    vals = " ".join(f"{series[k - 1]:8.4f}" for k in (10, 20, 30, 40))
    print(f"{algorithm:>14} {vals}")

# the gmfoo log labels every evaluation with its role in the loop
gmfoo_log = logs[0]
subtasks = {}
for r in gmfoo_log.records:
    subtasks[r.subtask] = subtasks.get(r.subtask, 0) + 1
print("\ngmfoo evaluation roles:", subtasks)
