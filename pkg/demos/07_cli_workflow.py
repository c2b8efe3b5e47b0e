"""
Driving the command-line interface
==================================

The CLI reads a TOML experiment recipe and exposes three subcommands:
validate (check the recipe), run (execute and write logs), diagnose
(latent-space correlation report). This script builds a recipe in a
temporary directory and walks all three; the same flow works from a
shell with the installed `gmfoo` entry point.
"""

import json
import tempfile
from pathlib import Path

from gmfoo.cli import main

workdir = Path(tempfile.mkdtemp(prefix="gmfoo-demo-"))
config = workdir / "experiment.toml"
config.write_text(
    """
[problem]
name = "fourier-quadratic"
d = 64

[latent]
kind = "analytic"
d_high = 8
d_low = 2

[run]
algorithms = ["gmo-low", "random-search"]
seeds = [0, 1]
budget = 24
doe_size_low = 12
ei_restarts = 4
fit_starts = 2
fit_max_evals = 60

[diagnose]
n = 100
seed = 0
"""
)

print("== validate ==")
code = main(["validate", "--config", str(config)])
print("exit code:", code)

print("\n== run ==")
out = workdir / "results"
code = main(["run", "--config", str(config), "--out", str(out)])
print("exit code:", code)
print("files:", sorted(p.name for p in out.iterdir()))
print("summary.csv:")
print((out / "summary.csv").read_text())

print("== diagnose ==")
code = main(["diagnose", "--config", str(config), "--out", str(out)])
print("exit code:", code)
print(json.loads((out / "diagnose.json").read_text()))

print("\nworkspace kept at", workdir)
