"""Exponential-sum inequalities and a seeded counterexample search.

Evaluates the split, matrix and tensor margins on small examples, shows the
degenerate-matrix reduction, then sweeps random instances inside and
outside the proven parameter range.
"""

import numpy as np

from expgamma import ineq
from expgamma.ineq import LambdaMatrix, LambdaTensor, SweepConfig

# %% one instance of each
print(ineq.margin_sum_split(2.0, [1.0, 2.0, 3.0], alpha=2.0))
ones = LambdaMatrix(np.ones((2, 2)))
print(ineq.margin_matrix(1.0, ones, alpha=1.0))
print(ineq.margin_tensor_2to1(1.0, LambdaTensor(np.ones((2, 2, 2))), alpha=1.0))
print(ineq.margin_tensor_1to2(1.0, LambdaTensor(np.ones((2, 2, 2))), alpha=1.0))

# %% shrinking all but the first row and column of a matrix
for eps in (1e-6, 1e-7, 1e-8):
    half, split = ineq.reduction_check([1.0, 2.0, 0.5], eps, x=1.0, alpha=1.0)
    print(f"eps={eps:.0e}: matrix/2 = {half.margin:.12f}, split = {split.margin:.12f}")

# %% sweeps: proven range, then beyond it
cfg = SweepConfig("matrix", (4, 5), samples=20_000, seed=42, alpha=1.0, rho=2.0)
rep = ineq.sweep(cfg)
print(f"alpha=1, rho=2: {len(rep.violations)} violations, min relative margin {rep.min_relative_margin:.3e}")

cfg = SweepConfig("matrix", (2, 2), samples=5_000, seed=42, alpha=1.0, rho=2.5)
rep = ineq.sweep(cfg)
print(f"alpha=1, rho=2.5: {len(rep.violations)} violations")
first = rep.violations[0]
lam, x = ineq.draw_sample(cfg, first["index"])  # any violation is reproducible from its index
print("  first one:", first["index"], np.round(lam, 4).tolist(), round(x, 4))

# %% the empirical (alpha, rho) frontier
cfg = SweepConfig("matrix", (3, 3), samples=5_000, seed=1,
                  frontier_alphas=(-1.0, 0.0, 0.5, 1.0, 2.0), frontier_rhos=(1.0, 1.5, 2.0, 2.5))
for p in ineq.sweep(cfg).frontier_points:
    mark = "ok" if p["flagged"] == 0 else f"{p['flagged']} flagged"
    print(f"alpha={p['alpha']:5.1f} rho={p['rho']:.1f}  worst {p['worst_relative_margin']: .3e}  {mark}")
