"""Gaussian-process regression and the two-fidelity GP used for exchange.

Single-fidelity models use an ARD squared-exponential kernel with additive
Gaussian noise. The two-fidelity model couples directly evaluated (high) and
exchanged (low) samples through an intrinsic-coregionalization covariance
``B (x) K`` with ``B = [[1, rho], [rho, 1]]``, which keeps the joint matrix
positive semidefinite for any ``|rho| <= 1``. Hyperparameters are fitted by
maximizing the log marginal likelihood with a multi-start Nelder-Mead search
in log-parameter space.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from gmfoo.core import Bounds, Fidelity, lhs_sample, standardize_outputs
from gmfoo.errors import NumericalError

# Jitter added to the covariance diagonal on factorization failure, escalating
# tenfold per rung; beyond the last rung a NumericalError is raised.
JITTER_LADDER = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

# Hyperparameter search box (natural-log scale, bounds-normalized inputs).
LOG_LENGTH_SCALE_RANGE = (math.log(0.01), math.log(10.0))
LOG_SIGNAL_VARIANCE_RANGE = (math.log(1e-3), math.log(1e3))
LOG_NOISE_RANGE = (math.log(1e-8), math.log(1e-1))
RHO_RAW_RANGE = (-3.0, 3.0)  # rho = tanh(raw), so |rho| <= tanh(3) ~ 0.995


@dataclass(frozen=True)
class KernelParams:
    """ARD squared-exponential hyperparameters plus fidelity coupling."""

    signal_variance: float
    length_scales: np.ndarray
    noise_variance_high: float = 0.0
    noise_variance_low: float = 0.0
    rho: float = 0.0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.length_scales, dtype=float))
        if self.signal_variance <= 0:
            raise ValueError("signal_variance must be positive")
        if ls.ndim != 1 or np.any(ls <= 0):
            raise ValueError("length_scales must be a 1-D vector of positives")
        if self.noise_variance_high < 0 or self.noise_variance_low < 0:
            raise ValueError("noise variances must be non-negative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        object.__setattr__(self, "length_scales", ls)
        object.__setattr__(self, "signal_variance", float(self.signal_variance))
        object.__setattr__(self, "noise_variance_high", float(self.noise_variance_high))
        object.__setattr__(self, "noise_variance_low", float(self.noise_variance_low))
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def dimension(self):
        return self.length_scales.size


def kernel(x, x2, params):
    """Squared-exponential covariance between two points.

    k(x, x') = sigma_f^2 * exp(-1/2 * sum_i (x_i - x'_i)^2 / l_i^2)
    """
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x.shape != x2.shape or x.size != params.dimension:
        raise ValueError("kernel inputs must match the length-scale dimension")
    r = (x - x2) / params.length_scales
    return params.signal_variance * math.exp(-0.5 * float(np.dot(r, r)))


def kernel_matrix(X, X2, params):
    """Cross-covariance matrix k(X, X2), shape (len(X), len(X2))."""
    U = np.asarray(X, dtype=float) / params.length_scales
    V = np.asarray(X2, dtype=float) / params.length_scales
    sq = (
        np.sum(U * U, axis=1)[:, None]
        + np.sum(V * V, axis=1)[None, :]
        - 2.0 * (U @ V.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return params.signal_variance * np.exp(-0.5 * sq)


def _cholesky_with_jitter(K):
    """Lower-triangular factor of K, escalating diagonal jitter on failure."""
    n = K.shape[0]
    for jitter in JITTER_LADDER:
        try:
            shifted = K if jitter == 0.0 else K + jitter * np.eye(n)
            c, low = cho_factor(shifted, lower=True, check_finite=False)
            return c, low, jitter
        except LinAlgError:
            continue
    raise NumericalError(
        f"covariance matrix is not positive definite even with jitter up to "
        f"{JITTER_LADDER[-1]:g}"
    )


def _lml_from_factor(cho, y):
    c, low = cho
    alpha = cho_solve((c, low), y, check_finite=False)
    logdet = 2.0 * float(np.sum(np.log(np.diag(c))))
    n = y.size
    return -0.5 * float(y @ alpha) - 0.5 * logdet - 0.5 * n * math.log(2.0 * math.pi)


def log_marginal_likelihood(X, y, params):
    """Gaussian log marginal likelihood of y under the kernel prior.

    -1/2 y^T (K + sigma_n^2 I)^-1 y - 1/2 log|K + sigma_n^2 I| - n/2 log 2 pi
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    K = kernel_matrix(X, X, params) + params.noise_variance_high * np.eye(len(y))
    c, low, _ = _cholesky_with_jitter(K)
    return _lml_from_factor((c, low), y)


class GpModel:
    """Fitted single-fidelity GP holding the factorized covariance.

    Outputs are standardized internally (unless built with
    ``standardize=False``); predictions are returned in original units.
    """

    def __init__(self, X, y, params, standardize=True):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        if X.shape[0] != y.size:
            raise ValueError("X and y lengths differ")
        if X.shape[1] != params.dimension:
            raise ValueError("input dimension does not match length_scales")
        self.X = X
        self.y = y
        self.params = params
        if standardize:
            y_std, self.y_mean, self.y_scale = standardize_outputs(y)
        else:
            y_std, self.y_mean, self.y_scale = y, 0.0, 1.0
        self._y_std = y_std
        K = kernel_matrix(X, X, params) + params.noise_variance_high * np.eye(y.size)
        c, low, self.jitter = _cholesky_with_jitter(K)
        self._cho = (c, low)
        self._alpha = cho_solve(self._cho, y_std, check_finite=False)

    @property
    def dimension(self):
        return self.X.shape[1]

    def log_marginal_likelihood(self):
        return _lml_from_factor(self._cho, self._y_std)

    def predict(self, x):
        """Posterior mean and variance at ``x``.

        Accepts a single point (d,) returning floats, or a batch (m, d)
        returning arrays. The posterior variance is clamped at zero before
        the observation noise is added.
        """
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = x[None, :] if single else x
        if pts.shape[1] != self.dimension:
            raise ValueError("query dimension does not match the model")
        kx = kernel_matrix(pts, self.X, self.params)
        mean = kx @ self._alpha
        w = solve_triangular(self._cho[0], kx.T, lower=True, check_finite=False)
        var = self.params.signal_variance - np.sum(w * w, axis=0)
        np.maximum(var, 0.0, out=var)
        var = var + self.params.noise_variance_high
        mean = mean * self.y_scale + self.y_mean
        var = var * self.y_scale**2
        if single:
            return float(mean[0]), float(var[0])
        return mean, var

    def to_json(self):
        return {
            "kind": "gp",
            "X": self.X.tolist(),
            "y": self.y.tolist(),
            "params": _params_to_json(self.params),
            "standardize": self.y_scale != 1.0 or self.y_mean != 0.0,
        }

    @classmethod
    def from_json(cls, blob):
        if isinstance(blob, str):
            blob = json.loads(blob)
        return cls(
            np.array(blob["X"]),
            np.array(blob["y"]),
            _params_from_json(blob["params"]),
            standardize=blob.get("standardize", True),
        )


def gp_predict(model, x):
    """Posterior (mean, variance) of a single-fidelity GP at ``x``."""
    return model.predict(x)


class MfgpModel:
    """Two-fidelity GP over one latent space.

    High-fidelity rows are directly evaluated samples of the space; low
    rows were transformed from the other latent space. The joint covariance
    is the coregionalized block matrix; predictions target the high-fidelity
    process and include its noise term.
    """

    def __init__(self, X_hi, y_hi, X_lo, y_lo, params, standardize=True):
        X_hi = np.atleast_2d(np.asarray(X_hi, dtype=float))
        y_hi = np.asarray(y_hi, dtype=float)
        X_lo = (
            np.empty((0, X_hi.shape[1]))
            if X_lo is None or len(X_lo) == 0
            else np.atleast_2d(np.asarray(X_lo, dtype=float))
        )
        y_lo = np.empty(0) if y_lo is None or len(y_lo) == 0 else np.asarray(y_lo, dtype=float)
        if X_hi.shape[1] != params.dimension or (
            X_lo.size and X_lo.shape[1] != params.dimension
        ):
            raise ValueError("input dimension does not match length_scales")
        self.X_hi, self.y_hi, self.X_lo, self.y_lo = X_hi, y_hi, X_lo, y_lo
        self.params = params
        y_joint = np.concatenate([y_hi, y_lo])
        if standardize:
            y_std, self.y_mean, self.y_scale = standardize_outputs(y_joint)
        else:
            y_std, self.y_mean, self.y_scale = y_joint, 0.0, 1.0
        self._y_std = y_std
        K = self._joint_covariance()
        c, low, self.jitter = _cholesky_with_jitter(K)
        self._cho = (c, low)
        self._alpha = cho_solve(self._cho, y_std, check_finite=False)

    def _joint_covariance(self):
        p = self.params
        n_hi, n_lo = len(self.y_hi), len(self.y_lo)
        K = np.empty((n_hi + n_lo, n_hi + n_lo))
        K[:n_hi, :n_hi] = kernel_matrix(self.X_hi, self.X_hi, p)
        K[:n_hi, :n_hi] += p.noise_variance_high * np.eye(n_hi)
        if n_lo:
            K_hl = p.rho * kernel_matrix(self.X_hi, self.X_lo, p)
            K[:n_hi, n_hi:] = K_hl
            K[n_hi:, :n_hi] = K_hl.T
            K[n_hi:, n_hi:] = kernel_matrix(self.X_lo, self.X_lo, p)
            K[n_hi:, n_hi:] += p.noise_variance_low * np.eye(n_lo)
        return K

    @property
    def dimension(self):
        return self.X_hi.shape[1]

    def log_marginal_likelihood(self):
        return _lml_from_factor(self._cho, self._y_std)

    def predict(self, x):
        """Posterior mean/variance of the high-fidelity process at ``x``."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = x[None, :] if single else x
        if pts.shape[1] != self.dimension:
            raise ValueError("query dimension does not match the model")
        k_hi = kernel_matrix(pts, self.X_hi, self.params)
        if len(self.y_lo):
            k_lo = self.params.rho * kernel_matrix(pts, self.X_lo, self.params)
            kx = np.hstack([k_hi, k_lo])
        else:
            kx = k_hi
        mean = kx @ self._alpha
        w = solve_triangular(self._cho[0], kx.T, lower=True, check_finite=False)
        var = self.params.signal_variance - np.sum(w * w, axis=0)
        np.maximum(var, 0.0, out=var)
        var = var + self.params.noise_variance_high
        mean = mean * self.y_scale + self.y_mean
        var = var * self.y_scale**2
        if single:
            return float(mean[0]), float(var[0])
        return mean, var

    def to_json(self):
        return {
            "kind": "mfgp",
            "X_hi": self.X_hi.tolist(),
            "y_hi": self.y_hi.tolist(),
            "X_lo": self.X_lo.tolist(),
            "y_lo": self.y_lo.tolist(),
            "params": _params_to_json(self.params),
        }

    @classmethod
    def from_json(cls, blob):
        if isinstance(blob, str):
            blob = json.loads(blob)
        return cls(
            np.array(blob["X_hi"]),
            np.array(blob["y_hi"]),
            np.array(blob["X_lo"]).reshape(len(blob["X_lo"]), -1),
            np.array(blob["y_lo"]),
            _params_from_json(blob["params"]),
        )


def mfgp_predict(model, x):
    """Posterior (mean, variance) of the two-fidelity GP at ``x``."""
    return model.predict(x)


def _params_to_json(params):
    return {
        "signal_variance": params.signal_variance,
        "length_scales": params.length_scales.tolist(),
        "noise_variance_high": params.noise_variance_high,
        "noise_variance_low": params.noise_variance_low,
        "rho": params.rho,
    }


def _params_from_json(blob):
    return KernelParams(
        blob["signal_variance"],
        np.array(blob["length_scales"]),
        blob["noise_variance_high"],
        blob["noise_variance_low"],
        blob["rho"],
    )


# ---------------------------------------------------------------------------
# Hyperparameter fitting


def _search_ranges(dim, mfgp):
    lo = [LOG_LENGTH_SCALE_RANGE[0]] * dim + [
        LOG_SIGNAL_VARIANCE_RANGE[0],
        LOG_NOISE_RANGE[0],
    ]
    hi = [LOG_LENGTH_SCALE_RANGE[1]] * dim + [
        LOG_SIGNAL_VARIANCE_RANGE[1],
        LOG_NOISE_RANGE[1],
    ]
    if mfgp:
        lo += [LOG_NOISE_RANGE[0], RHO_RAW_RANGE[0]]
        hi += [LOG_NOISE_RANGE[1], RHO_RAW_RANGE[1]]
    return np.array(lo), np.array(hi)


def _unpack_theta(theta, dim, mfgp, lo, hi):
    theta = np.clip(theta, lo, hi)
    ls = np.exp(theta[:dim])
    sv = math.exp(theta[dim])
    noise_hi = math.exp(theta[dim + 1])
    if mfgp:
        noise_lo = math.exp(theta[dim + 2])
        rho = math.tanh(theta[dim + 3])
    else:
        noise_lo, rho = 0.0, 0.0
    return KernelParams(sv, ls, noise_hi, noise_lo, rho)


def _pack_params(params, mfgp):
    theta = np.concatenate(
        [
            np.log(params.length_scales),
            [math.log(params.signal_variance), math.log(max(params.noise_variance_high, 1e-8))],
        ]
    )
    if mfgp:
        rho = min(max(params.rho, -0.99), 0.99)
        theta = np.concatenate(
            [theta, [math.log(max(params.noise_variance_low, 1e-8)), math.atanh(rho)]]
        )
    return theta


def _neg_lml_objective(X_hi, y_std, dim, mfgp, X_lo=None, n_hi=None):
    """Builds the fitting objective with pairwise distances precomputed."""
    if mfgp:
        X_all = np.vstack([X_hi, X_lo]) if len(X_lo) else X_hi
    else:
        X_all = X_hi
    n = X_all.shape[0]
    diff = X_all[:, None, :] - X_all[None, :, :]
    # Pairwise squared differences, flattened so each likelihood evaluation
    # reduces to one matrix-vector product.
    D2 = (diff * diff).reshape(n * n, dim)
    lo, hi = _search_ranges(dim, mfgp)
    n_hi = n if n_hi is None else n_hi

    def neg_lml(theta):
        params = _unpack_theta(theta, dim, mfgp, lo, hi)
        sq = (D2 @ (1.0 / (params.length_scales**2))).reshape(n, n)
        K = params.signal_variance * np.exp(-0.5 * sq)
        if mfgp and n_hi < n:
            K[:n_hi, n_hi:] *= params.rho
            K[n_hi:, :n_hi] *= params.rho
            idx = np.arange(n)
            K[idx[:n_hi], idx[:n_hi]] += params.noise_variance_high
            K[idx[n_hi:], idx[n_hi:]] += params.noise_variance_low
        else:
            K[np.diag_indices_from(K)] += params.noise_variance_high
        try:
            c, low, _ = _cholesky_with_jitter(K)
        except NumericalError:
            return 1e25
        return -_lml_from_factor((c, low), y_std)

    return neg_lml, lo, hi


def _multistart_search(neg_lml, lo, hi, seed, n_starts, max_evals, extra_starts=()):
    """Nelder-Mead from LHS starts; returns the best parameter vector found."""
    starts = lhs_sample(n_starts, Bounds(lo, hi), seed)
    start_list = [starts[i] for i in range(n_starts)] + [
        np.asarray(s, dtype=float) for s in extra_starts
    ]
    best_theta, best_val = None, np.inf
    for x0 in start_list:
        res = minimize(
            neg_lml,
            np.clip(x0, lo, hi),
            method="Nelder-Mead",
            options={
                "maxfev": max_evals,
                "xatol": 0.02,
                "fatol": 0.02,
                "adaptive": True,
            },
        )
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
    if best_theta is None or not np.isfinite(best_val):
        raise NumericalError("hyperparameter search found no valid parameters")
    return np.clip(best_theta, lo, hi)


def fit_gp(X, y, seed, n_starts=5, max_evals_per_start=200, standardize=True, warm_start=None):
    """Fit a single-fidelity GP by maximum log marginal likelihood.

    Parameters
    ----------
    X, y : training inputs (n, d) and outputs (n,); n >= 2 required.
    seed : RngSeed driving the multi-start initialization.
    n_starts : number of LHS starting points for Nelder-Mead.
    max_evals_per_start : likelihood-evaluation budget per start.
    standardize : standardize outputs before fitting (default on).
    warm_start : optional KernelParams used as one extra search start.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.size:
        raise ValueError("X and y lengths differ")
    if y.size < 2:
        raise ValueError("fitting a GP requires at least 2 samples")
    dim = X.shape[1]
    y_std = standardize_outputs(y)[0] if standardize else y
    neg_lml, lo, hi = _neg_lml_objective(X, y_std, dim, mfgp=False)
    extra = [_pack_params(warm_start, mfgp=False)] if warm_start is not None else []
    theta = _multistart_search(
        neg_lml, lo, hi, seed, n_starts, max_evals_per_start, extra_starts=extra
    )
    params = _unpack_theta(theta, dim, False, lo, hi)
    return GpModel(X, y, params, standardize=standardize)


def fit_mfgp(hi, lo, seed, n_starts=5, max_evals_per_start=200, warm_start=None):
    """Fit the two-fidelity GP on a high- plus a low-fidelity dataset.

    ``hi`` and ``lo`` are :class:`gmfoo.core.Dataset` instances (or anything
    exposing ``arrays()``); ``lo`` may be empty, in which case the fit reduces
    exactly to :func:`fit_gp` on the high-fidelity data.
    """
    X_hi, y_hi = hi.arrays(Fidelity.HIGH) if hasattr(hi, "arrays") else hi
    X_lo, y_lo = lo.arrays() if hasattr(lo, "arrays") else (lo if lo is not None else (None, None))
    if y_hi.size < 2:
        raise ValueError("fitting requires at least 2 high-fidelity samples")
    if X_lo is None or len(X_lo) == 0:
        gp = fit_gp(
            X_hi,
            y_hi,
            seed,
            n_starts=n_starts,
            max_evals_per_start=max_evals_per_start,
            warm_start=warm_start,
        )
        return MfgpModel(X_hi, y_hi, None, None, gp.params)
    dim = X_hi.shape[1]
    y_joint = np.concatenate([y_hi, y_lo])
    y_std = standardize_outputs(y_joint)[0]
    neg_lml, lo_rng, hi_rng = _neg_lml_objective(
        X_hi, y_std, dim, mfgp=True, X_lo=X_lo, n_hi=y_hi.size
    )
    extra = [_pack_params(warm_start, mfgp=True)] if warm_start is not None else []
    theta = _multistart_search(
        neg_lml, lo_rng, hi_rng, seed, n_starts, max_evals_per_start, extra_starts=extra
    )
    params = _unpack_theta(theta, dim, True, lo_rng, hi_rng)
    return MfgpModel(X_hi, y_hi, X_lo, y_lo, params)
