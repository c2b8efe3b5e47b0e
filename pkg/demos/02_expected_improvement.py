"""
Expected improvement and its maximizer
======================================

EI scores a candidate by how much it is expected to beat the incumbent
minimum under the GP posterior. The maximizer is a multi-start compass
search; all restarts advance in lockstep so each poll is one batched
model call.
"""

import numpy as np

from gmfoo import (
    Bounds,
    RngSeed,
    expected_improvement,
    fit_gp,
    maximize_ei,
)

# the closed form at the incumbent with unit variance is 1/sqrt(2 pi)
print("EI(mean = f_min, var = 1):", expected_improvement(0.0, 1.0, 0.0))

# with zero variance the belief is deterministic
print("EI(mean = 2, var = 0, f_min = 5):", expected_improvement(2.0, 0.0, 5.0))
print("EI(mean = 5, var = 0, f_min = 2):", expected_improvement(5.0, 0.0, 2.0))

# a small optimization step: observe 5 points, ask EI where to go next
rng = np.random.default_rng(1)
f = lambda x: (x - 0.6) ** 2
X = rng.uniform(-1.0, 1.0, (5, 1))
y = f(X[:, 0])

model = fit_gp(X, y, RngSeed(7))
bounds = Bounds([-1.0], [1.0])
query = maximize_ei(model, bounds, float(y.min()), RngSeed(8))

print("\nobserved x:", np.sort(X[:, 0]).round(3))
print("incumbent :", y.min())
print("EI query  :", query.x[0], "with EI", query.ei)
print("true value there:", f(query.x[0]))

# the query lands between the incumbent region and unexplored space;
# a dense grid confirms the search found the global EI maximum
grid = np.linspace(-1.0, 1.0, 4001)[:, None]
mean, var = model.predict(grid)
ei = expected_improvement(mean, var, float(y.min()))
print("grid max EI     :", ei.max(), "at", grid[ei.argmax(), 0])
