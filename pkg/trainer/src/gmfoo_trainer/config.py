"""Training configuration loaded from TOML or JSON files."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from gmfoo_trainer.errors import ConfigError
from gmfoo_trainer.netio import ACTIVATIONS

DISC_DATASET = "discs"


@dataclass(frozen=True)
class TrainerConfig:
    """Everything one adversarial training run needs.

    The latent prior is fixed: z is uniform on [-1, 1]^d_high and the code
    c is the first d_low coordinates of z, matching the optimizer's search
    box and its zero-padded embedding of low-space points.
    """

    dataset: str  # DISC_DATASET or a path to a curve CSV corpus
    d_high: int
    d_low: int
    lam: float = 1.0  # weight of the code-recovery regularizer
    epochs: int = 10
    batch_size: int = 64
    seed: int = 0
    n_images: int = 1024  # corpus size when dataset is DISC_DATASET
    lr: float = 1e-3
    out_dir: str = "."
    generator_name: str = "generator.json"
    encoder_name: str = "encoder.json"
    # "" picks by corpus kind: sigmoid for images, tanh for curves
    output_activation: str = ""

    def __post_init__(self):
        problems = []
        if not isinstance(self.dataset, str) or not self.dataset:
            problems.append("dataset: must be a non-empty string")
        if self.d_low < 1:
            problems.append("d_low: must be at least 1")
        if self.d_low >= self.d_high:
            problems.append(
                f"d_low: must be below d_high, got {self.d_low} >= {self.d_high}"
            )
        if not self.lam > 0:
            problems.append(f"lambda: must be positive, got {self.lam}")
        if self.epochs < 1:
            problems.append("epochs: must be at least 1")
        if self.batch_size < 2:
            problems.append("batch_size: must be at least 2")
        if self.n_images < self.batch_size:
            problems.append("n_images: must cover at least one batch")
        if not self.lr > 0:
            problems.append("lr: must be positive")
        if self.output_activation not in ("",) + ACTIVATIONS:
            problems.append(
                f"output_activation: unknown value {self.output_activation!r}"
            )
        if problems:
            raise ConfigError("; ".join(problems))


_CASTERS = {
    "dataset": str,
    "d_high": int,
    "d_low": int,
    "epochs": int,
    "batch_size": int,
    "seed": int,
    "n_images": int,
    "lam": float,
    "lr": float,
    "out_dir": str,
    "generator_name": str,
    "encoder_name": str,
    "output_activation": str,
}

# files spell the weight "lambda"; the dataclass field is `lam`
_FILE_KEYS = (set(_CASTERS) - {"lam"}) | {"lambda"}


def load_trainer_config(path):
    """Parse a TOML (or JSON) config file into a TrainerConfig.

    The regularizer weight is spelled "lambda" in files; it maps to the
    `lam` attribute because of the Python keyword.
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".json"):
        try:
            blob = json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    else:
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            blob = tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    if not isinstance(blob, dict):
        raise ConfigError(f"{path}: config must be a table of keys")
    blob = dict(blob)
    unknown = sorted(set(blob) - _FILE_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "lambda" in blob:
        blob["lam"] = blob.pop("lambda")
    for key in ("dataset", "d_high", "d_low"):
        if key not in blob:
            raise ConfigError(f"missing required config key: {key}")
    kwargs = {}
    for key, value in blob.items():
        try:
            kwargs[key] = _CASTERS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}") from exc
    return TrainerConfig(**kwargs)
