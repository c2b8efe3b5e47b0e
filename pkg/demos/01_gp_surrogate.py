"""
Fitting a Gaussian process surrogate
====================================

Build a GP on a handful of noisy observations of a 1-D function, fit its
kernel hyperparameters by maximizing the log marginal likelihood, and
inspect the posterior at a few probe points.
"""

import numpy as np

from gmfoo import GpModel, KernelParams, RngSeed, fit_gp

rng = np.random.default_rng(0)

# the ground truth we pretend not to know
f = lambda x: np.sin(3.0 * x) + 0.2 * x**2

X = rng.uniform(-2.0, 2.0, (12, 1))
y = f(X[:, 0]) + 0.05 * rng.normal(size=12)

# multistart hyperparameter search in log space; the seed fixes the starts
model = fit_gp(X, y, RngSeed(42))
print("fitted length scale :", model.params.length_scales[0])
print("fitted signal var   :", model.params.signal_variance)
print("fitted noise var    :", model.params.noise_variance_high)
print("log marginal lik.   :", model.log_marginal_likelihood())

# posterior mean tracks the function, variance grows away from the data
print("\n  x      truth    mean     std")
for x in [-1.5, -0.5, 0.0, 0.8, 1.9, 3.5]:
    mean, var = model.predict(np.array([x]))
    print(f"{x:5.1f} {f(x):8.3f} {mean:8.3f} {np.sqrt(var):8.3f}")

# a hand-rolled kernel underperforms the fitted one
clumsy = GpModel(X, y, KernelParams(1.0, [5.0], 0.01))
print("\nfitted LML  :", model.log_marginal_likelihood())
print("ls=5 LML    :", clumsy.log_marginal_likelihood())
