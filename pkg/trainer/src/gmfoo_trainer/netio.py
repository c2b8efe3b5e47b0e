"""Writers for the gmfoo-net-v1 dense-network interchange format.

The optimizer package consumes networks as JSON documents. This module
builds and writes those documents without importing the consumer, so the
file format stays the only coupling between the two packages. Weight
matrices are stored flat in row-major order with shape (rows, cols) =
(outputs, inputs); a layer computes activation(W @ x + b).
"""

from __future__ import annotations

import json
import os

import numpy as np

NETWORK_FORMAT = "gmfoo-net-v1"

ACTIVATIONS = ("identity", "relu", "sigmoid", "tanh")


def layer_doc(weights, bias, activation):
    """One dense layer as a JSON-ready dict."""
    W = np.asarray(weights, dtype=float)
    b = np.asarray(bias, dtype=float)
    if W.ndim != 2:
        raise ValueError("layer weights must be a 2-D matrix")
    if b.shape != (W.shape[0],):
        raise ValueError(
            f"bias length {b.shape[0] if b.ndim == 1 else b.shape} does not "
            f"match {W.shape[0]} output rows"
        )
    if activation not in ACTIVATIONS:
        raise ValueError(
            f"unknown activation {activation!r}; expected one of "
            f"{sorted(ACTIVATIONS)}"
        )
    if not (np.isfinite(W).all() and np.isfinite(b).all()):
        raise ValueError("layer parameters must be finite")
    return {
        "rows": int(W.shape[0]),
        "cols": int(W.shape[1]),
        "weights": W.reshape(-1).tolist(),
        "bias": b.tolist(),
        "activation": activation,
    }


def network_doc(input_dim, output_dim, layers):
    """Assemble a full network document, checking the layer chain."""
    layers = list(layers)
    if not layers:
        raise ValueError("network must have at least one layer")
    if layers[0]["cols"] != int(input_dim):
        raise ValueError(
            f"layer 0 consumes {layers[0]['cols']} inputs but the network "
            f"declares input_dim {input_dim}"
        )
    for i in range(1, len(layers)):
        if layers[i]["cols"] != layers[i - 1]["rows"]:
            raise ValueError(
                f"layer {i} expects {layers[i]['cols']} inputs but layer "
                f"{i - 1} produces {layers[i - 1]['rows']} outputs"
            )
    if layers[-1]["rows"] != int(output_dim):
        raise ValueError(
            f"layer {len(layers) - 1} produces {layers[-1]['rows']} outputs "
            f"but the network declares output_dim {output_dim}"
        )
    return {
        "format": NETWORK_FORMAT,
        "input_dim": int(input_dim),
        "output_dim": int(output_dim),
        "layers": layers,
    }


def save_doc(doc, path):
    """Write a JSON document atomically (temp file, then rename)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)
