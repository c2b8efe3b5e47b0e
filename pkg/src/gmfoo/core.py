"""Foundational types: bounds, samples, datasets, seeding, and LHS designs."""

from __future__ import annotations

import csv
import enum
import zlib
from dataclasses import dataclass, field

import numpy as np

# Two high-fidelity samples closer than this (per coordinate) are treated as
# the same point; tighter spacing makes the GP covariance numerically singular.
DUPLICATE_TOL = 1e-12


class Fidelity(enum.Enum):
    HIGH = "high"
    LOW = "low"


class Origin(enum.Enum):
    DOE = "doe"
    EI_QUERY = "ei_query"
    NARROWED_QUERY = "narrowed_query"
    EXCHANGED = "exchanged"


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned box, one (lower, upper) interval per dimension."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or upper.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if lower.size < 1:
            raise ValueError("bounds need at least one dimension")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ValueError("bounds must be finite")
        if not np.all(lower <= upper):
            raise ValueError("each lower bound must not exceed its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def symmetric_unit(cls, dimension):
        """The default latent box [-1, 1]^dimension."""
        return cls(-np.ones(dimension), np.ones(dimension))

    @property
    def dimension(self):
        return self.lower.size

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, x, atol=0.0):
        x = np.asarray(x, dtype=float)
        return bool(
            np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol)
        )

    def clip(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def intersect(self, other):
        lower = np.maximum(self.lower, other.lower)
        upper = np.minimum(self.upper, other.upper)
        if not np.all(lower <= upper):
            raise ValueError("boxes do not overlap")
        return Bounds(lower, upper)


@dataclass(frozen=True)
class RngSeed:
    """64-bit seed; the same seed always reproduces the same random stream."""

    seed: int

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self):
        return np.random.default_rng(self.seed)

    def derive(self, *labels):
        """Deterministic child seed for an independent stream.

        Labels (strings or ints) are hashed with CRC-32 so distinct purposes
        (algorithm names, iteration counters) never share a stream.
        """
        entropy = [self.seed]
        for label in labels:
            if isinstance(label, str):
                entropy.append(zlib.crc32(label.encode("utf-8")))
            else:
                entropy.append(int(label) & 0xFFFFFFFF)
        child = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0]
        return RngSeed(int(child))


@dataclass(frozen=True)
class Sample:
    """One evaluated latent point."""

    x: np.ndarray
    y: float
    fidelity: Fidelity = Fidelity.HIGH
    origin: Origin = Origin.DOE

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if x.ndim != 1:
            raise ValueError("sample coordinates must be a 1-D vector")
        y = float(self.y)
        if not np.isfinite(y):
            raise ValueError("sample objective value must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass
class Dataset:
    """Append-only collection of samples sharing one latent space.

    High-fidelity duplicates (per-coordinate agreement within
    ``DUPLICATE_TOL``) are rejected; low-fidelity duplicates are allowed
    because the cross-space exchange legitimately reproduces existing points.
    """

    dimension: int
    bounds: Bounds | None = None
    samples: list = field(default_factory=list)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dataset dimension must be >= 1")
        if self.bounds is not None and self.bounds.dimension != self.dimension:
            raise ValueError("bounds dimension does not match dataset dimension")

    def __len__(self):
        return len(self.samples)

    def append(self, sample):
        if sample.x.size != self.dimension:
            raise ValueError(
                f"sample has dimension {sample.x.size}, dataset expects {self.dimension}"
            )
        if self.bounds is not None and not self.bounds.contains(sample.x, atol=1e-9):
            raise ValueError("sample lies outside the dataset bounds")
        if sample.fidelity is Fidelity.HIGH and self.contains_point(
            sample.x, fidelity=Fidelity.HIGH
        ):
            raise ValueError("duplicate high-fidelity sample rejected")
        self.samples.append(sample)

    def contains_point(self, x, fidelity=None, tol=DUPLICATE_TOL):
        x = np.asarray(x, dtype=float)
        for s in self.samples:
            if fidelity is not None and s.fidelity is not fidelity:
                continue
            if np.all(np.abs(s.x - x) <= tol):
                return True
        return False

    def subset(self, fidelity):
        return [s for s in self.samples if s.fidelity is fidelity]

    def arrays(self, fidelity=None):
        """(X, y) matrices, optionally restricted to one fidelity."""
        picked = self.samples if fidelity is None else self.subset(fidelity)
        if not picked:
            return np.empty((0, self.dimension)), np.empty(0)
        X = np.vstack([s.x for s in picked])
        y = np.array([s.y for s in picked])
        return X, y

    def best(self, fidelity=Fidelity.HIGH):
        """Sample with the lowest objective value at the given fidelity."""
        picked = self.subset(fidelity)
        if not picked:
            return None
        return min(picked, key=lambda s: s.y)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [f"x{i}" for i in range(self.dimension)] + ["y", "fidelity", "origin"]
            )
            for s in self.samples:
                writer.writerow(
                    [f"{v:.17g}" for v in s.x]
                    + [f"{s.y:.17g}", s.fidelity.value, s.origin.value]
                )

    @classmethod
    def from_csv(cls, path, bounds=None):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[-3:] != ["y", "fidelity", "origin"]:
                raise ValueError(f"unexpected dataset header in {path}")
            dimension = len(header) - 3
            ds = cls(dimension, bounds=bounds)
            for row in reader:
                ds.append(
                    Sample(
                        np.array([float(v) for v in row[:dimension]]),
                        float(row[dimension]),
                        Fidelity(row[dimension + 1]),
                        Origin(row[dimension + 2]),
                    )
                )
        return ds


def lhs_sample(n, bounds, seed):
    """Latin hypercube design: ``n`` points stratified per dimension.

    Each dimension's interval is split into ``n`` equal bins; a random
    permutation assigns one point per bin and the position inside each bin is
    uniform. Deterministic for a fixed (n, bounds, seed) triple.

    Returns an (n, d) array.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not isinstance(bounds, Bounds):
        raise ValueError("bounds must be a Bounds instance")
    rng = seed.generator()
    d = bounds.dimension
    unit = np.empty((n, d))
    for j in range(d):
        bins = rng.permutation(n)
        unit[:, j] = (bins + rng.uniform(size=n)) / n
    return bounds.lower + unit * bounds.width


def standardize_outputs(ys):
    """Shift/scale values to zero mean, unit variance.

    Returns (standardized, mean, std); ``std`` is clamped below by 1e-12 so
    constant inputs stay finite. The inverse transform is
    ``y = standardized * std + mean``.
    """
    ys = np.asarray(ys, dtype=float)
    if ys.size == 0:
        raise ValueError("cannot standardize an empty list")
    mean = float(np.mean(ys))
    std = float(np.std(ys))
    std = max(std, 1e-12)
    return (ys - mean) / std, mean, std
