"""
From training to search: the two-package handoff
================================================

The companion trainer package (trainer/) produces generator/encoder
pairs; this package searches them. The only thing the two share is the
gmfoo-net-v1 JSON file format. This script trains a small adversarial
pair on the built-in disc corpus, checks with `diagnose` that the learned
low-dimensional space orders designs the same way the full space does,
then maximizes inked area in both spaces at once.

Requires the trainer package: pip install -e trainer/ --no-build-isolation
"""

import json
import tempfile
import time
from pathlib import Path

from gmfoo_trainer import TrainerConfig, train_mfoo_gan

from gmfoo.cli import main

workdir = Path(tempfile.mkdtemp(prefix="gmfoo-demo-"))
t0 = time.perf_counter()

# about half a minute of training; an undertrained generator barely
# varies with its code and the correlation below collapses toward zero
report = train_mfoo_gan(
    TrainerConfig(
        dataset="discs",
        d_high=8,
        d_low=2,
        epochs=60,
        n_images=2048,
        batch_size=128,
        lr=2e-3,
        seed=1,
        out_dir=str(workdir / "pair"),
    )
)
print(f"trained in {time.perf_counter() - t0:.1f}s")
print(
    f"code recovery {report.regularizer[0]:.2f} -> {report.regularizer[-1]:.2f}, "
    f"validation gap {report.validation_gap:.3f}"
)

recipe = workdir / "search.toml"
recipe.write_text(
    f"""
[problem]
name = "area"

[latent]
kind = "files"
generator = "{report.generator_path}"
encoder = "{report.encoder_path}"
d_high = 8
d_low = 2

[run]
algorithms = ["gmfoo", "gmo-high"]
seeds = [0]
budget = 20
doe_size_low = 8
ei_restarts = 8
fit_starts = 2
fit_max_evals = 60
out = "{workdir / "results"}"

[diagnose]
n = 300
seed = 7
"""
)

print("\ndiagnose: does the low space preserve the area ordering?")
main(["diagnose", "--config", str(recipe)])

print("\nsearch: grow the largest disc the generator can draw")
main(["run", "--config", str(recipe)])

for log_name in ("gmfoo_0.runlog.json", "gmo-high_0.runlog.json"):
    log = json.loads((workdir / "results" / log_name).read_text())
    best = log["records"][-1]["best_so_far"]
    # area objective is a negative pixel count, so negate for reading
    print(f"  {log['algorithm']}: best area {-best:.0f} pixels")
