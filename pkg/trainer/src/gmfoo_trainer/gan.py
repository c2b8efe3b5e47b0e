"""Adversarial training with a code-recovery regularizer.

The generator maps z drawn uniformly from [-1, 1]^d_high to designs. A
separate encoder predicts the first d_low coordinates of z back from the
design; its error, expressed as the negative log density of the code under
a factored Gaussian with learned per-dimension widths, is added to the
generator's loss. Minimizing that term forces the leading latent
coordinates to control the design's main features, which is what makes the
exported pair useful for coupled-space search. The discriminator trains on
plain binary cross-entropy and never receives the recovery gradient.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from gmfoo_trainer.config import DISC_DATASET, TrainerConfig
from gmfoo_trainer.data import disc_images, load_curve_corpus
from gmfoo_trainer.errors import DataError, TrainingDiverged
from gmfoo_trainer.netio import layer_doc, network_doc, save_doc

log = logging.getLogger("gmfoo_trainer")

HIDDEN_WIDTH = 256
VALIDATION_DRAWS = 256

REPORT_NAME = "report.json"

_STAGE_NAMES = {nn.ReLU: "relu", nn.Sigmoid: "sigmoid", nn.Tanh: "tanh"}

_OUT_STAGES = {"identity": None, "relu": nn.ReLU, "sigmoid": nn.Sigmoid, "tanh": nn.Tanh}


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch training record plus the final code-recovery quality."""

    d_loss: tuple  # per-epoch mean discriminator cross-entropy
    g_loss: tuple  # per-epoch mean generator adversarial cross-entropy
    regularizer: tuple  # per-epoch code-recovery value on a frozen batch
    validation_gap: float  # final mean |c - c'| over held-out embedded draws
    generator_path: str
    encoder_path: str

    def to_dict(self):
        return {
            "d_loss": list(self.d_loss),
            "g_loss": list(self.g_loss),
            "regularizer": list(self.regularizer),
            "validation_gap": self.validation_gap,
            "generator": os.path.basename(self.generator_path),
            "encoder": os.path.basename(self.encoder_path),
        }


def code_recovery(c, mu, log_width):
    """Mean negative log density of codes under the encoder's Gaussian.

    Per sample: sum_j ((c_j - mu_j)^2 / (2 w_j^2) + log(w_j sqrt(2 pi)))
    with widths w = exp(log_width) shared across samples and learned as
    free parameters.
    """
    inv_var = torch.exp(-2.0 * log_width)
    quad = 0.5 * ((c - mu) ** 2 * inv_var).sum(dim=1)
    norm = (log_width + 0.5 * math.log(2.0 * math.pi)).sum()
    return (quad + norm).mean()


def _mlp(d_in, d_out, out_activation):
    stages = [
        nn.Linear(d_in, HIDDEN_WIDTH),
        nn.ReLU(),
        nn.Linear(HIDDEN_WIDTH, HIDDEN_WIDTH),
        nn.ReLU(),
        nn.Linear(HIDDEN_WIDTH, d_out),
    ]
    out = _OUT_STAGES[out_activation]
    if out is not None:
        stages.append(out())
    return nn.Sequential(*stages).double()


def _export_doc(model, input_dim, output_dim):
    """Serialize a Sequential of Linear and activation stages to a doc."""
    docs = []
    pending = None
    for stage in model:
        if isinstance(stage, nn.Linear):
            if pending is not None:
                docs.append(_linear_doc(pending, "identity"))
            pending = stage
        else:
            docs.append(_linear_doc(pending, _STAGE_NAMES[type(stage)]))
            pending = None
    if pending is not None:
        docs.append(_linear_doc(pending, "identity"))
    return network_doc(input_dim, output_dim, docs)


def _linear_doc(linear, activation):
    return layer_doc(
        linear.weight.detach().cpu().numpy(),
        linear.bias.detach().cpu().numpy(),
        activation,
    )


def _draw_prior(n, d):
    return torch.rand(n, d, dtype=torch.float64) * 2.0 - 1.0


def _load_dataset(cfg):
    if cfg.dataset == DISC_DATASET:
        return disc_images(cfg.n_images, cfg.seed)
    X = load_curve_corpus(cfg.dataset)
    if X.shape[0] < cfg.batch_size:
        raise DataError(
            f"corpus has {X.shape[0]} rows, below batch_size {cfg.batch_size}"
        )
    return X


def train_mfoo_gan(cfg: TrainerConfig):
    """Train the pair, export both networks, and write the report.

    Returns the TrainReport. Exports land in cfg.out_dir as gmfoo-net-v1
    JSON under cfg.generator_name / cfg.encoder_name next to report.json;
    every file is written atomically. A non-finite loss aborts with the
    epoch index in the message.
    """
    X = _load_dataset(cfg)
    n, D = X.shape
    out_act = cfg.output_activation or (
        "sigmoid" if cfg.dataset == DISC_DATASET else "tanh"
    )
    torch.manual_seed(cfg.seed)
    gen = _mlp(cfg.d_high, D, out_act)
    disc = _mlp(D, 1, "identity")
    enc = _mlp(D, cfg.d_low, "identity")
    log_width = torch.zeros(cfg.d_low, dtype=torch.float64, requires_grad=True)
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.lr, betas=(0.5, 0.999))
    opt_g = torch.optim.Adam(
        [*gen.parameters(), *enc.parameters(), log_width],
        lr=cfg.lr,
        betas=(0.5, 0.999),
    )
    bce = nn.BCEWithLogitsLoss()
    data = torch.from_numpy(np.ascontiguousarray(X))

    # frozen draws: one batch tracks the regularizer across epochs, one
    # held-out embedded batch scores the final recovery gap
    z_frozen = _draw_prior(VALIDATION_DRAWS, cfg.d_high)
    c_held = _draw_prior(VALIDATION_DRAWS, cfg.d_low)
    z_held = torch.zeros(VALIDATION_DRAWS, cfg.d_high, dtype=torch.float64)
    z_held[:, : cfg.d_low] = c_held

    shuffle = np.random.default_rng(cfg.seed)
    d_hist, g_hist, reg_hist = [], [], []
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle.permutation(n)
        d_sum = g_sum = 0.0
        batches = 0
        for start in range(0, n - cfg.batch_size + 1, cfg.batch_size):
            x_real = data[order[start : start + cfg.batch_size]]
            b = x_real.shape[0]
            ones = torch.ones(b, 1, dtype=torch.float64)
            zeros = torch.zeros(b, 1, dtype=torch.float64)
            z = _draw_prior(b, cfg.d_high)
            c = z[:, : cfg.d_low]

            with torch.no_grad():
                x_fake = gen(z)
            d_loss = bce(disc(x_real), ones) + bce(disc(x_fake), zeros)
            opt_d.zero_grad()
            d_loss.backward()
            opt_d.step()

            # generator step; the recovery gradient reaches the generator,
            # the encoder, and the widths, never the discriminator
            x_fake = gen(z)
            adv = bce(disc(x_fake), ones)
            reg = code_recovery(c, enc(x_fake), log_width)
            opt_g.zero_grad()
            opt_d.zero_grad()
            (adv + cfg.lam * reg).backward()
            opt_g.step()

            d_sum += float(d_loss.detach())
            g_sum += float(adv.detach())
            batches += 1
        with torch.no_grad():
            frozen_reg = float(
                code_recovery(z_frozen[:, : cfg.d_low], enc(gen(z_frozen)), log_width)
            )
        d_hist.append(d_sum / batches)
        g_hist.append(g_sum / batches)
        reg_hist.append(frozen_reg)
        if not all(math.isfinite(v) for v in (d_hist[-1], g_hist[-1], frozen_reg)):
            raise TrainingDiverged(f"non-finite loss at epoch {epoch}")
        log.info(
            "epoch %d: d %.4f g %.4f recovery %.4f",
            epoch,
            d_hist[-1],
            g_hist[-1],
            frozen_reg,
        )

    with torch.no_grad():
        gap = float(torch.mean(torch.abs(c_held - enc(gen(z_held)))))
    if not math.isfinite(gap):
        raise TrainingDiverged(f"non-finite validation gap at epoch {cfg.epochs}")

    os.makedirs(cfg.out_dir, exist_ok=True)
    gen_path = os.path.join(cfg.out_dir, cfg.generator_name)
    enc_path = os.path.join(cfg.out_dir, cfg.encoder_name)
    save_doc(_export_doc(gen, cfg.d_high, D), gen_path)
    save_doc(_export_doc(enc, D, cfg.d_low), enc_path)
    report = TrainReport(
        tuple(d_hist), tuple(g_hist), tuple(reg_hist), gap, gen_path, enc_path
    )
    blob = report.to_dict()
    blob.update(
        {
            "dataset": cfg.dataset,
            "d_high": cfg.d_high,
            "d_low": cfg.d_low,
            "lambda": cfg.lam,
            "epochs": cfg.epochs,
            "batch_size": cfg.batch_size,
            "seed": cfg.seed,
        }
    )
    save_doc(blob, os.path.join(cfg.out_dir, REPORT_NAME))
    return report
