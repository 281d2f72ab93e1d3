"""The family h_alpha(t) = t^(alpha-1) / (e^(1/t) - 1).

Walks through the shape of h_alpha as alpha moves across 1 and 0: convex,
one inflection, two inflections; then log-concavity and the maximum that
appears for negative alpha.
"""

import numpy as np

from expgamma import hfamily as hf
from expgamma.monocheck import GridSpec, check_convex

# %% values and limits
t = np.array([1e-3, 1e-1, 1.0, 10.0, 1e3])
for alpha in (2.0, 1.0, 0.0, -1.0):
    print(f"alpha={alpha:5.1f}  h =", np.array2string(hf.h_alpha(alpha, t), precision=4))

# At t -> 0+ every member vanishes (faster than any power); at infinity the
# limit is infinite, 1 or 0 depending on the sign of alpha.
print("h_0(1e6) =", hf.h_alpha(0.0, 1e6))

# %% convexity and the inflection census
grid = GridSpec(1e-3, 1e3, 10_000)
for alpha in (3.0, 1.0, 0.5, 0.0, -0.5, -3.0):
    rep = hf.inflection_points(alpha, grid)
    roots = ", ".join(f"{r:.6g}" for r in rep.roots) or "-"
    print(f"alpha={alpha:5.1f}  regime={rep.regime:16s} roots: {roots}")

# The analytic second derivative and a difference-based check agree.
for alpha in (1.0, 0.9):
    rep = check_convex(lambda x, a=alpha: hf.h_alpha(a, x), GridSpec(1e-2, 1e2, 2000))
    print(f"difference convexity check, alpha={alpha}: {rep}")

# %% the factorisation behind the second derivative
# h'' = h/t^2 (alpha - 3/2 + H1(1/t)/2)(alpha - 3/2 + H2(1/t)/2) with H1 rising
# from 3 and H2 from 1, so alpha >= 1 makes both factors positive.
s = np.array([1e-6, 1e-2, 1.0, 10.0])
h1, h2 = hf.aux_H1_H2(s)
print("H1:", h1)
print("H2:", h2)
print("series coefficients of the discriminant:", [str(c) for c in hf.series_D_coefficients(6)])

# %% log-concavity and the maximum
for alpha in (1.0, 0.0, -0.5, -2.0):
    tm = hf.extremum_point(alpha, grid)
    where = "increasing (no maximum)" if tm is None else f"maximum at t* = {tm:.10g}"
    print(f"alpha={alpha:5.1f}  {where}")
