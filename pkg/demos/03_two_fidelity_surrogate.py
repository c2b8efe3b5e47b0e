"""
A two-fidelity Gaussian process
===============================

When cheap auxiliary observations correlate with the expensive truth,
a coupled surrogate squeezes information out of both. The joint
covariance links the two sample sets through a correlation rho learned
from the data; rho = 0 reduces to a plain GP on the expensive set.
"""

import numpy as np

from gmfoo import RngSeed, fit_gp, fit_mfgp

rng = np.random.default_rng(3)

truth = lambda x: np.sin(4.0 * x) + x
cheap = lambda x: 0.8 * truth(x) + 0.2  # scaled and shifted stand-in

# 4 expensive points, 20 cheap ones
X_hi = rng.uniform(-1.0, 1.0, (4, 1))
y_hi = truth(X_hi[:, 0])
X_lo = rng.uniform(-1.0, 1.0, (20, 1))
y_lo = cheap(X_lo[:, 0])

coupled = fit_mfgp((X_hi, y_hi), (X_lo, y_lo), RngSeed(0))
alone = fit_gp(X_hi, y_hi, RngSeed(0))

print("learned fidelity correlation rho:", coupled.params.rho)

# prediction error against the truth on a dense grid
grid = np.linspace(-1.0, 1.0, 200)[:, None]
t = truth(grid[:, 0])
err_coupled = np.sqrt(np.mean((coupled.predict(grid)[0] - t) ** 2))
err_alone = np.sqrt(np.mean((alone.predict(grid)[0] - t) ** 2))
print("RMSE, 4 points alone      :", err_alone)
print("RMSE, 4 points + 20 cheap :", err_coupled)

# an empty cheap set degenerates to the plain GP exactly
empty = fit_mfgp((X_hi, y_hi), (np.zeros((0, 1)), np.zeros(0)), RngSeed(0))
gap = np.max(np.abs(empty.predict(grid)[0] - alone.predict(grid)[0]))
print("max |empty-low MFGP - GP| :", gap)
