"""Gamma ratios built from a positive weight matrix.

ln F(t) = sum nu^theta lnGamma(1+nu t) + sum tau^theta lnGamma(1+tau t)
          - rho sum lambda^theta lnGamma(1+lambda t),
with nu, tau the row and column sums.  P = [ln F]'' is completely monotonic
for rho <= 2 and theta >= 0.
"""

import numpy as np

from expgamma import gammaratio as gr
from expgamma.ineq import LambdaMatrix
from expgamma.monocheck import GridSpec, check_sign_pattern

lm = LambdaMatrix([[0.5, 1.0, 2.0], [1.5, 0.2, 0.8]])
t = np.geomspace(1e-3, 1e3, 100)

# %% complete monotonicity of P
for rho, theta in ((2.0, 0.0), (1.0, 1.0), (2.5, 0.0)):
    spec = gr.RatioSpec(lm, rho, theta)
    grid = GridSpec(1e-3, 1e3, 100, tol_rel=1e-10, tol_abs=0.0)
    rep = check_sign_pattern(lambda x, k: gr.P_deriv(x, spec, k), 5, grid,
                             scale=lambda x, k: gr.P_deriv_scale(x, spec, k),
                             property_id=f"rho={rho} theta={theta}")
    print(rep)

# %% the first derivative of ln F: limits at both ends
spec = gr.RatioSpec(lm, 2.0, 0.0)
print("sup [ln F]' (entropy form):", gr.lnF_d1_sup(spec))
print("[ln F]'(1e7):              ", gr.ln_F_deriv(1e7, spec, 1))
print("range for rho=2, theta=0:   ", gr.lnF_d1_range(spec))
print("range for rho=1, theta=0:   ", gr.lnF_d1_range(gr.RatioSpec(lm, 1.0, 0.0)))

# %% minimum of F when rho < 2
for rho in (0.0, 1.0, 1.5, 1.9):
    s = gr.RatioSpec(lm, rho, 0.0)
    tm = gr.find_min_F(s)
    print(f"rho={rho}: t* = {tm:.10g}, ln F(t*) = {gr.ln_F(tm, s):.6g}")

# %% the Stirling remainder behind the supremum
s = np.array([1e-4, 0.1, 1.0, 10.0, 100.0])
print("theta(s):", gr.stirling_theta(s))
print("lnGamma(1+3.7) via the remainder integral:", gr.binet_ln_gamma1p(3.7), "direct:", gr.ln_gamma1p(3.7))
