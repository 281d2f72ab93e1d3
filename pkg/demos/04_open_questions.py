"""Empirical looks at questions without known answers.

Nothing here asserts a result: the scripts record what random sampling
and grid scans show.
"""

import numpy as np

from expgamma import gammaratio as gr
from expgamma import hfamily as hf
from expgamma import ineq
from expgamma.ineq import LambdaTensor, SweepConfig
from expgamma.monocheck import GridSpec

# %% is alpha >= 1 also necessary for convexity?
t = GridSpec(1e-3, 1e3, 10_000).nodes()
for alpha in (0.999, 0.99, 0.9, 0.5):
    d2 = hf.h_alpha_derivs(alpha, t).d2
    neg = t[d2 < 0]
    print(f"alpha={alpha}: h'' < 0 on {neg.size} grid points" + (f", first at t={neg[0]:.4g}" if neg.size else ""))

# %% largest alpha range for the split inequality at rho = 1
cfg = SweepConfig("sum_split", (3,), samples=20_000, seed=5,
                  frontier_alphas=tuple(np.round(np.arange(-1.0, 1.01, 0.25), 2)), frontier_rhos=(1.0,))
for p in ineq.sweep(cfg).frontier_points:
    print(f"alpha={p['alpha']:5.2f}: worst relative margin {p['worst_relative_margin']: .3e}, flagged {p['flagged']}")

# %% sign patterns of the tensor combinations
rng = np.random.default_rng(0)
lt = LambdaTensor(np.exp(rng.uniform(-1, 1, (2, 2, 2))))
grid = GridSpec(1e-3, 1e3, 60).nodes()
for variant in ("L1", "L2", "R1", "R2"):
    for rho in (2.0, 3.0, 4.0):
        spec = gr.ConjectureSpec(lt, rho, 1.0, variant)
        pattern = ""
        for k in range(5):
            v = gr.conjecture_eval(grid, spec, k)
            pattern += "+" if np.all(v >= 0) else "-" if np.all(v <= 0) else "~"
        print(f"{variant} rho={rho}: derivative signs k=0..4: {pattern}")
