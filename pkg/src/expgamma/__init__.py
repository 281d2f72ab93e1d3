"""Numerical verification of convexity, exponential-sum and gamma-ratio properties.

Modules:

* :mod:`expgamma.specfun` -- log-gamma, polygamma, Bernoulli numbers, q-gamma,
  a cancellation-free ``1/(e^x - 1)``;
* :mod:`expgamma.hfamily` -- ``h_alpha(t) = t^(alpha-1)/(e^(1/t)-1)``, its
  derivatives, auxiliary functions, inflection and extremum points;
* :mod:`expgamma.ineq` -- exponential-sum inequality margins and seeded sweeps;
* :mod:`expgamma.gammaratio` -- gamma-function ratios and trigamma combinations;
* :mod:`expgamma.monocheck` -- grid-based property checks with witnesses;
* :mod:`expgamma.suites` -- named verification suites used by the CLI.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    ExpGammaError,
    InputError,
    NoBracketError,
    PreconditionError,
    RegimeMismatchError,
    UnsupportedOrderError,
)
from .gammaratio import (
    UNBOUNDED,
    BinomSpec,
    ConjectureSpec,
    MultinomSpec,
    P_deriv,
    P_eval,
    RatioSpec,
    conjecture_eval,
    find_min_F,
    ln_F,
    ln_F_deriv,
    ln_G,
    ln_Q,
    lnF_d1_range,
    lnF_d1_sup,
    stirling_theta,
)
from .hfamily import (
    aux_H1_H2,
    discriminant_D,
    extremum_point,
    h_alpha,
    h_alpha_derivs,
    inflection_points,
    log_h_alpha_d2,
    logconc_H,
    series_D,
)
from .ineq import (
    LambdaMatrix,
    LambdaTensor,
    Margin,
    SweepConfig,
    SweepReport,
    margin_matrix,
    margin_sum_split,
    margin_tensor_1to2,
    margin_tensor_2to1,
    reduction_check,
    sweep,
)
from .monocheck import (
    CheckReport,
    GridSpec,
    check_convex,
    check_ratio_monotone,
    check_sign_pattern,
    check_star_shaped,
    check_superadditive,
    count_sign_changes,
)
from .specfun import (
    Accuracy,
    QParam,
    bernoulli_number,
    ln_gamma,
    polygamma,
    q_ln_gamma,
    recip_expm1,
)

__version__ = "0.1.0"
