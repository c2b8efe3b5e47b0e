"""Command-line entry points for the two training routes.

`train-gan --config PATH` runs adversarial training from a TOML or JSON
recipe; `train-svd --data PATH --dim D --out DIR` fits the linear
baseline to a CSV corpus. Both write generator.json, encoder.json, and
report.json into the output directory, atomically.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from gmfoo_trainer.config import load_trainer_config
from gmfoo_trainer.data import load_curve_corpus
from gmfoo_trainer.errors import TrainerError
from gmfoo_trainer.gan import REPORT_NAME, train_mfoo_gan
from gmfoo_trainer.netio import save_doc
from gmfoo_trainer.svd import train_svd

EXIT_OK = 0
EXIT_FAILURE = 1


def _setup_logging():
    level = os.environ.get("GMFOO_TRAINER_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
            level, logging.ERROR
        ),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main_train_gan(argv=None):
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="train-gan",
        description="Train a generator/encoder pair and export gmfoo-net-v1 JSON",
    )
    parser.add_argument("--config", required=True, help="training recipe (TOML or JSON)")
    args = parser.parse_args(argv)
    try:
        cfg = load_trainer_config(args.config)
        report = train_mfoo_gan(cfg)
    except TrainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"generator: {report.generator_path}")
    print(f"encoder: {report.encoder_path}")
    print(f"report: {os.path.join(cfg.out_dir, REPORT_NAME)}")
    print(
        f"epochs: {cfg.epochs}  recovery {report.regularizer[0]:.4f} -> "
        f"{report.regularizer[-1]:.4f}  validation gap {report.validation_gap:.4f}"
    )
    return EXIT_OK


def main_train_svd(argv=None):
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="train-svd",
        description="Fit the rank-d linear baseline and export gmfoo-net-v1 JSON",
    )
    parser.add_argument("--data", required=True, help="CSV corpus, one design per row")
    parser.add_argument("--dim", required=True, type=int, help="latent dimension")
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)
    try:
        X = load_curve_corpus(args.data)
        result = train_svd(X, args.dim)
    except TrainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    os.makedirs(args.out, exist_ok=True)
    gen_path = os.path.join(args.out, "generator.json")
    enc_path = os.path.join(args.out, "encoder.json")
    save_doc(result.generator, gen_path)
    save_doc(result.encoder, enc_path)
    save_doc(
        {
            "rows": int(X.shape[0]),
            "data_dim": int(X.shape[1]),
            "dim": args.dim,
            "relative_error": result.relative_error,
            "singular_values": list(result.singular_values),
            "generator": "generator.json",
            "encoder": "encoder.json",
        },
        os.path.join(args.out, REPORT_NAME),
    )
    print(f"generator: {gen_path}")
    print(f"encoder: {enc_path}")
    print(f"relative reconstruction error: {result.relative_error:.3e}")
    return EXIT_OK
