"""Generator/encoder networks and the maps linking the two latent spaces.

A trained pair couples a high-dimensional latent space Z with a
low-dimensional one C through the shared design space: embedding pads a low
point c to z = [c, 0, ..., 0], projection runs a design through the encoder
to recover its low code. Networks are plain dense MLPs loaded from the
gmfoo-net-v1 JSON interchange format.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from gmfoo.core import Bounds, RngSeed
from gmfoo.errors import NetworkFormatError, NumericalError

NETWORK_FORMAT = "gmfoo-net-v1"

_ACTIVATIONS = {
    "relu": lambda a: np.maximum(a, 0.0),
    "tanh": np.tanh,
    "sigmoid": expit,
    "identity": lambda a: a,
}


@dataclass(frozen=True)
class Layer:
    """One dense layer: output = activation(weights @ input + bias)."""

    weights: np.ndarray  # (rows, cols): rows = outputs, cols = inputs
    bias: np.ndarray  # (rows,)
    activation: str

    def __post_init__(self):
        W = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if W.ndim != 2:
            raise NetworkFormatError("layer weights must be a 2-D matrix")
        if b.shape != (W.shape[0],):
            raise NetworkFormatError(
                f"bias length {b.shape[0] if b.ndim == 1 else b.shape} does "
                f"not match {W.shape[0]} output rows"
            )
        if self.activation not in _ACTIVATIONS:
            raise NetworkFormatError(
                f"unknown activation {self.activation!r}; expected one of "
                f"{sorted(_ACTIVATIONS)}"
            )
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "bias", b)

    @property
    def rows(self):
        return self.weights.shape[0]

    @property
    def cols(self):
        return self.weights.shape[1]


@dataclass(frozen=True)
class Network:
    """Dense feed-forward network with a declared input/output signature."""

    input_dim: int
    output_dim: int
    layers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise NetworkFormatError("network must declare at least one layer")
        if layers[0].cols != self.input_dim:
            raise NetworkFormatError(
                f"layer 0 consumes {layers[0].cols} inputs but the network "
                f"declares input_dim {self.input_dim}"
            )
        for i in range(1, len(layers)):
            if layers[i].cols != layers[i - 1].rows:
                raise NetworkFormatError(
                    f"layer {i} expects {layers[i].cols} inputs but layer "
                    f"{i - 1} produces {layers[i - 1].rows} outputs"
                )
        if layers[-1].rows != self.output_dim:
            raise NetworkFormatError(
                f"layer {len(layers) - 1} produces {layers[-1].rows} outputs "
                f"but the network declares output_dim {self.output_dim}"
            )
        object.__setattr__(self, "layers", layers)

    def to_dict(self):
        return {
            "format": NETWORK_FORMAT,
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "layers": [
                {
                    "rows": layer.rows,
                    "cols": layer.cols,
                    "weights": layer.weights.reshape(-1).tolist(),
                    "bias": layer.bias.tolist(),
                    "activation": layer.activation,
                }
                for layer in self.layers
            ],
        }

    @classmethod
    def from_dict(cls, blob):
        if not isinstance(blob, dict):
            raise NetworkFormatError("network document must be a JSON object")
        if blob.get("format") != NETWORK_FORMAT:
            raise NetworkFormatError(
                f"unsupported network format {blob.get('format')!r}; "
                f"expected {NETWORK_FORMAT!r}"
            )
        for key in ("input_dim", "output_dim", "layers"):
            if key not in blob:
                raise NetworkFormatError(f"network document missing {key!r}")
        layers = []
        for i, spec in enumerate(blob["layers"]):
            try:
                rows, cols = int(spec["rows"]), int(spec["cols"])
                weights = np.asarray(spec["weights"], dtype=float)
                bias = np.asarray(spec["bias"], dtype=float)
                activation = spec["activation"]
            except (KeyError, TypeError, ValueError) as exc:
                raise NetworkFormatError(f"layer {i} is malformed: {exc}") from exc
            if weights.size != rows * cols:
                raise NetworkFormatError(
                    f"layer {i} declares {rows}x{cols} = {rows * cols} weights "
                    f"but provides {weights.size}"
                )
            layers.append(Layer(weights.reshape(rows, cols), bias, activation))
        return cls(int(blob["input_dim"]), int(blob["output_dim"]), tuple(layers))


def load_network(path):
    """Load and validate a gmfoo-net-v1 JSON network file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            blob = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkFormatError(f"{path}: not valid JSON: {exc}") from exc
    return Network.from_dict(blob)


def save_network(net, path):
    """Write a network as gmfoo-net-v1 JSON (atomically, temp then rename)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(net.to_dict(), fh)
    os.replace(tmp, path)


def forward(net, x):
    """Evaluate the network on one input vector (d,) or a batch (m, d).

    Raises NumericalError if any output is non-finite.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    A = x[None, :] if single else x
    if A.shape[1] != net.input_dim:
        raise ValueError(
            f"input length {A.shape[1]} does not match input_dim {net.input_dim}"
        )
    for layer in net.layers:
        A = _ACTIVATIONS[layer.activation](A @ layer.weights.T + layer.bias)
    if not np.all(np.isfinite(A)):
        raise NumericalError("network forward pass produced non-finite values")
    return A[0] if single else A


@dataclass(frozen=True)
class LatentSpacePair:
    """Coupled high/low latent spaces sharing one design space."""

    d_high: int
    d_low: int
    generator: Network
    encoder: Network
    bounds_high: Bounds = None
    bounds_low: Bounds = None

    def __post_init__(self):
        if not self.d_low < self.d_high:
            raise ValueError("d_low must be strictly less than d_high")
        if self.generator.input_dim != self.d_high:
            raise ValueError("generator input_dim must equal d_high")
        if self.encoder.output_dim != self.d_low:
            raise ValueError("encoder output_dim must equal d_low")
        if self.encoder.input_dim != self.generator.output_dim:
            raise ValueError("encoder input_dim must equal generator output_dim")
        if self.bounds_high is None:
            object.__setattr__(self, "bounds_high", Bounds.symmetric_unit(self.d_high))
        if self.bounds_low is None:
            object.__setattr__(self, "bounds_low", Bounds.symmetric_unit(self.d_low))
        if self.bounds_high.dimension != self.d_high:
            raise ValueError("bounds_high dimension must equal d_high")
        if self.bounds_low.dimension != self.d_low:
            raise ValueError("bounds_low dimension must equal d_low")

    @property
    def design_dim(self):
        return self.generator.output_dim


def embed_low_to_high(c, d_high):
    """Pad a low-space point to the high space: c -> [c, 0, ..., 0]."""
    c = np.asarray(c, dtype=float)
    single = c.ndim == 1
    C = c[None, :] if single else c
    if C.shape[1] == 0:
        raise ValueError("cannot embed an empty low-space vector")
    if C.shape[1] >= d_high:
        raise ValueError(
            f"low vector of length {C.shape[1]} does not fit in a "
            f"{d_high}-dimensional space"
        )
    Z = np.zeros((C.shape[0], d_high))
    Z[:, : C.shape[1]] = C
    return Z[0] if single else Z


def project_high_to_low(z, pair):
    """Map a high-space point to the low space: encoder(generator(z)).

    The encoder output is clamped into the pair's low bounds so the
    exchange never produces out-of-box samples.
    """
    x = forward(pair.generator, z)
    c = forward(pair.encoder, x)
    return pair.bounds_low.clip(c) if c.ndim == 1 else np.clip(
        c, pair.bounds_low.lower, pair.bounds_low.upper
    )


@dataclass(frozen=True)
class PearsonReport:
    """Paired objective values along the two latent routes."""

    n_pairs: int
    pearson: float
    pairs: np.ndarray  # (n, 2) columns: y via z, y via projected c'

    def __post_init__(self):
        object.__setattr__(self, "pairs", np.asarray(self.pairs, dtype=float))

    def to_csv(self, path):
        header = "y_high,y_low"
        np.savetxt(path, self.pairs, delimiter=",", header=header, comments="", fmt="%.17g")


def pearson_coefficient(a, b):
    """Product-moment correlation; 0 when either series is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    sa, sb = a.std(), b.std()
    if sa < 1e-15 or sb < 1e-15:
        return 0.0
    return float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))


def correlation_report(pair, objective, n, seed):
    """Compare objective values reached via z against its projected c'.

    Draws n points uniformly in the high box; for each z evaluates
    y_high = f(g(z)) and y_low = f(g([c', 0])) with c' = project(z). A
    strong positive correlation indicates the low space preserves the
    objective's ordering and is safe to optimize in.
    """
    if n < 3:
        raise ValueError("correlation_report requires n >= 3")
    rng = seed.generator() if isinstance(seed, RngSeed) else RngSeed(int(seed)).generator()
    Z = rng.uniform(pair.bounds_high.lower, pair.bounds_high.upper, (n, pair.d_high))
    X_high = forward(pair.generator, Z)
    C = project_high_to_low(Z, pair)
    X_low = forward(pair.generator, embed_low_to_high(C, pair.d_high))
    y_high = np.array([float(objective(x)) for x in X_high])
    y_low = np.array([float(objective(x)) for x in X_low])
    r = pearson_coefficient(y_high, y_low)
    return PearsonReport(n, r, np.column_stack([y_high, y_low]))
