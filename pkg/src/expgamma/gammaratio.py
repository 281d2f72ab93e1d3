"""Ratios of products of gamma functions and their log-derivatives.

For a positive matrix lambda with row sums nu and column sums tau,

    ln F(t) = sum_i nu_i^th lnG(1+nu_i t) + sum_j tau_j^th lnG(1+tau_j t)
              - rho sum_ij lambda_ij^th lnG(1+lambda_ij t),

and every derivative is the same weighted sum with ``w^(th+k) psi^(k-1)``.
``P = [ln F]''`` is completely monotonic for rho <= 2, theta >= 0.  The
tensor variants L1, L2 (trigamma combinations) and R1, R2 (gamma ratios)
use the single- and double-index partial sums of a LambdaTensor.

All derivatives are analytic (polygamma); finite differences appear only in
tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy import special as _sp

from .errors import DomainError, InputError, NoBracketError, PreconditionError, UnsupportedOrderError
from .ineq import LambdaMatrix, LambdaTensor
from .monocheck import GridSpec, refine_root
from .specfun import (
    EULER_GAMMA,
    ZETA2,
    Accuracy,
    QParam,
    _as_positive,
    _unwrap,
    bernoulli_fraction,
    polygamma,
    q_ln_gamma,
    recip_expm1,
)

__all__ = [
    "RatioSpec",
    "BinomSpec",
    "MultinomSpec",
    "ConjectureSpec",
    "UNBOUNDED",
    "D1Range",
    "ln_gamma1p",
    "ln_G",
    "ln_Q",
    "ln_F",
    "ln_F_deriv",
    "ln_F_deriv_scale",
    "P_eval",
    "P_deriv",
    "P_deriv_scale",
    "lnF_d1_sup",
    "lnF_d1_range",
    "lnF_d2_sup",
    "find_min_F",
    "stirling_theta",
    "binet_ln_gamma1p",
    "conjecture_eval",
    "conjecture_scale",
]

MAX_P_ORDER = 8
MAX_LNF_ORDER = 9
MAX_CONJECTURE_ORDER = 6


def _finite(value, name):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InputError(name, f"must be a real number, got {value!r}") from None
    if not math.isfinite(v):
        raise InputError(name, f"must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class RatioSpec:
    lm: LambdaMatrix
    rho: float = 2.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rho", _finite(self.rho, "rho"))
        object.__setattr__(self, "theta", _finite(self.theta, "theta"))

    @classmethod
    def from_json(cls, obj) -> "RatioSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict):
            raise InputError("<root>", "expected a JSON object")
        return cls(LambdaMatrix.from_json(obj), obj.get("rho", 2.0), obj.get("theta", 0.0))

    def weights(self):
        """Flattened weights and their coefficients (+1 for sums, -rho for entries)."""
        lm = self.lm
        w = np.concatenate([lm.nu, lm.tau, lm.entries.ravel()])
        c = np.concatenate([np.ones(lm.nu.size + lm.tau.size), np.full(lm.entries.size, -self.rho)])
        return w, c


@dataclass(frozen=True)
class BinomSpec:
    n: int
    k: int
    p: float

    def __post_init__(self):
        if int(self.n) != self.n or int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise DomainError(f"need integers 0 <= k <= n, got n={self.n}, k={self.k}")
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class MultinomSpec:
    lambdas: tuple
    probs: tuple
    q: QParam | None = None

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        p = np.asarray(self.probs, dtype=float).ravel()
        if lam.size == 0 or lam.size != p.size:
            raise DomainError("lambdas and probs must be nonempty and of equal length")
        if np.any(~np.isfinite(lam) | (lam <= 0)):
            raise DomainError("lambdas must be finite and positive")
        if np.any(~(p > 0) | ~(p <= 1)) or (p.size > 1 and np.any(p >= 1)):
            raise DomainError("probs must lie in (0, 1) (a single category has p = 1)")
        if abs(p.sum() - 1.0) > 1e-12:
            raise DomainError(f"probs must sum to 1 within 1e-12, got {p.sum()!r}")
        object.__setattr__(self, "lambdas", tuple(lam))
        object.__setattr__(self, "probs", tuple(p))
        if self.q is not None and not isinstance(self.q, QParam):
            object.__setattr__(self, "q", QParam(float(self.q)))


_VARIANTS = ("L1", "L2", "R1", "R2")


@dataclass(frozen=True)
class ConjectureSpec:
    lt: LambdaTensor
    rho: float = 3.0
    theta: float = 0.0
    variant: str = "L1"

    def __post_init__(self):
        object.__setattr__(self, "rho", _finite(self.rho, "rho"))
        object.__setattr__(self, "theta", _finite(self.theta, "theta"))
        if self.variant not in _VARIANTS:
            raise InputError("variant", f"must be one of {_VARIANTS}, got {self.variant!r}")

    @classmethod
    def from_json(cls, obj) -> "ConjectureSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict):
            raise InputError("<root>", "expected a JSON object")
        return cls(LambdaTensor.from_json(obj), obj.get("rho", 3.0), obj.get("theta", 0.0),
                   obj.get("variant", "L1"))

    def weights(self):
        lt = self.lt
        groups = lt.single_sums if self.variant in ("L1", "R1") else lt.double_sums
        agg = np.concatenate([np.ravel(g) for g in groups])
        w = np.concatenate([agg, lt.entries.ravel()])
        c = np.concatenate([np.ones(agg.size), np.full(lt.entries.size, -self.rho)])
        return w, c


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class _Unbounded:
    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "+inf (unbounded)"


UNBOUNDED = _Unbounded()


class D1Range(NamedTuple):
    """Range ``(lower, upper)`` of [ln F]'; ``upper`` may be :data:`UNBOUNDED`."""

    lower: float
    upper: float | _Unbounded


_ZETA_K = np.arange(2, 42)
_ZETA_COEF = (-1.0) ** _ZETA_K * _sp.zeta(_ZETA_K.astype(float)) / _ZETA_K


def _ln_gamma1p_series(x):
    # ln Gamma(1+x) = -gamma x + sum_{k>=2} (-1)^k zeta(k) x^k / k, |x| < 1
    acc = np.zeros_like(x)
    for c in _ZETA_COEF[::-1]:
        acc = (acc + c) * x
    return (acc - EULER_GAMMA) * x


def ln_gamma1p(x):
    """ln Gamma(1 + x) for x >= 0, accurate near x = 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa) | (xa < 0)):
        raise DomainError(f"x must be finite and >= 0, got {x!r}")
    out = np.empty_like(xa)
    small = xa < 0.2
    out[small] = _ln_gamma1p_series(xa[small])
    out[~small] = _sp.gammaln(1.0 + xa[~small])
    return _unwrap(out, x)


def _combo(t, w, c, exponent, order):
    """sum_g c_g w_g^exponent f(1 + w_g t), f = ln Gamma (order -1) or psi^(order)."""
    ta = _as_positive(t, "t")
    wt = np.multiply.outer(ta, w)
    vals = ln_gamma1p(wt) if order < 0 else polygamma(order, 1.0 + wt)
    out = (vals * (c * w**exponent)).sum(axis=-1)
    return _unwrap(out, t)


def _combo_scale(t, w, c, exponent, order):
    ta = _as_positive(t, "t")
    wt = np.multiply.outer(ta, w)
    vals = ln_gamma1p(wt) if order < 0 else polygamma(order, 1.0 + wt)
    return _unwrap(np.abs(vals * (c * w**exponent)).sum(axis=-1), t)


def _check_order(k, cap, name):
    if int(k) != k or k < 0:
        raise DomainError(f"{name} order must be a nonnegative integer, got {k}")
    if k > cap:
        raise UnsupportedOrderError(f"{name} order {k} exceeds the supported maximum {cap}")
    return int(k)


# ---------------------------------------------------------------------------
# binomial / multinomial ratios


def ln_G(x, spec: BinomSpec):
    """ln[Gamma(nx+1)/(Gamma(kx+1)Gamma((n-k)x+1)) p^(kx) (1-p)^((n-k)x)]."""
    xa = _as_positive(x, "x")
    n, k, p = spec.n, spec.k, spec.p
    out = (
        ln_gamma1p(n * xa) - ln_gamma1p(k * xa) - ln_gamma1p((n - k) * xa)
        + k * xa * math.log(p) + (n - k) * xa * math.log1p(-p)
    )
    return _unwrap(out, x)


def ln_Q(x: float, spec: MultinomSpec, acc: Accuracy | None = None) -> float:
    """ln[Gamma(1+x sum lambda)/prod Gamma(1+x lambda_i) prod p_i^(x lambda_i)].

    With ``spec.q`` set, every Gamma is the q-gamma function.
    """
    x = float(_as_positive(x, "x"))
    lam = np.asarray(spec.lambdas)
    tail = x * float(np.sum(lam * np.log(spec.probs)))
    if spec.q is None:
        return float(ln_gamma1p(x * lam.sum()) - np.sum(ln_gamma1p(x * lam))) + tail
    q = spec.q
    head = q_ln_gamma(q, 1.0 + x * lam.sum(), acc) - math.fsum(q_ln_gamma(q, 1.0 + x * li, acc) for li in lam)
    return head + tail


# ---------------------------------------------------------------------------
# F and P


def ln_F(t, spec: RatioSpec):
    """ln F(t)."""
    w, c = spec.weights()
    return _combo(t, w, c, spec.theta, -1)


def ln_F_deriv(t, spec: RatioSpec, k: int):
    """k-th derivative of ln F: sum c w^(theta+k) psi^(k-1)(1 + w t); k=0 is ln F."""
    k = _check_order(k, MAX_LNF_ORDER, "ln F derivative")
    w, c = spec.weights()
    return _combo(t, w, c, spec.theta + k, k - 1)


def ln_F_deriv_scale(t, spec: RatioSpec, k: int):
    """Sum of absolute terms of :func:`ln_F_deriv` (magnitude before cancellation)."""
    k = _check_order(k, MAX_LNF_ORDER, "ln F derivative")
    w, c = spec.weights()
    return _combo_scale(t, w, c, spec.theta + k, k - 1)


def P_eval(t, spec: RatioSpec):
    """P(t) = [ln F]''(t), the trigamma combination."""
    return ln_F_deriv(t, spec, 2)


def P_deriv(t, spec: RatioSpec, k: int):
    """k-th derivative of P: sum c w^(theta+2+k) psi^(k+1)(1 + w t)."""
    k = _check_order(k, MAX_P_ORDER, "P derivative")
    return ln_F_deriv(t, spec, k + 2)


def P_deriv_scale(t, spec: RatioSpec, k: int):
    k = _check_order(k, MAX_P_ORDER, "P derivative")
    return ln_F_deriv_scale(t, spec, k + 2)


def _power_sum(spec: RatioSpec, power):
    w, c = spec.weights()
    return math.fsum(c * w**power)


def lnF_d1_sup(spec: RatioSpec) -> float:
    """sup of [ln F]' for rho = 2, theta = 0.

    Equals sum nu ln nu + sum tau ln tau - 2 sum lambda ln lambda, the log of
    the entropy product; positive unless the matrix has a single row or
    column.
    """
    if spec.rho != 2.0 or spec.theta != 0.0:
        raise PreconditionError(
            f"the supremum is finite only for rho=2, theta=0 (got rho={spec.rho}, "
            f"theta={spec.theta}); use lnF_d1_range for the unbounded case"
        )
    lm = spec.lm
    e = lm.entries.ravel()
    return math.fsum(np.concatenate([lm.nu * np.log(lm.nu), lm.tau * np.log(lm.tau), -2.0 * e * np.log(e)]))


def lnF_d1_range(spec: RatioSpec) -> D1Range:
    """Range of [ln F]' over (0, inf) for rho <= 2, theta >= 0.

    The lower end is the t -> 0+ value -gamma * sum c w^(theta+1) (for
    rho = 2, theta = 0 this is 0); the upper end is :func:`lnF_d1_sup` or
    :data:`UNBOUNDED`.
    """
    _require_cm(spec)
    lower = -EULER_GAMMA * _power_sum(spec, spec.theta + 1.0)
    if spec.rho == 2.0 and spec.theta == 0.0:
        return D1Range(0.0, lnF_d1_sup(spec))
    return D1Range(lower, UNBOUNDED)


def lnF_d2_sup(spec: RatioSpec) -> float:
    """lim_{t->0+} P(t) = (pi^2/6) sum c w^(theta+2)."""
    return ZETA2 * _power_sum(spec, spec.theta + 2.0)


def _require_cm(spec):
    if not (spec.rho <= 2.0 and spec.theta >= 0.0):
        raise PreconditionError(f"needs rho <= 2 and theta >= 0, got rho={spec.rho}, theta={spec.theta}")


_WINDOW_LIMITS = (1e-8, 1e8)


def find_min_F(spec: RatioSpec, grid: GridSpec | None = None) -> float:
    """Unique minimiser of F for rho < 2 or theta > 0.

    [ln F]' is increasing, so its single sign change is bracketed on the
    grid window (widened by decades up to [1e-8, 1e8] if needed) and refined
    by bisection to relative 1e-12.
    """
    if not (spec.rho < 2.0 or spec.theta > 0.0):
        raise PreconditionError(f"F has an interior minimum only for rho < 2 or theta > 0 "
                                f"(got rho={spec.rho}, theta={spec.theta})")
    grid = grid or GridSpec.default()
    d1 = lambda t: ln_F_deriv(t, spec, 1)
    lo, hi = grid.lo, grid.hi
    while d1(lo) > 0 and lo > _WINDOW_LIMITS[0]:
        lo = max(lo / 10.0, _WINDOW_LIMITS[0])
    while d1(hi) < 0 and hi < _WINDOW_LIMITS[1]:
        hi = min(hi * 10.0, _WINDOW_LIMITS[1])
    nodes = np.geomspace(lo, hi, max(grid.points, 3))
    vals = np.asarray(d1(nodes))
    change = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if change.size == 0:
        raise NoBracketError(
            f"[ln F]' has no sign change on [{lo:g}, {hi:g}] "
            f"(values {vals[0]:.3g} .. {vals[-1]:.3g})"
        )
    i = int(change[0])
    return refine_root(d1, float(nodes[i]), float(nodes[i + 1]), rtol=1e-12)


# ---------------------------------------------------------------------------
# Stirling remainder


def _theta_coef():
    # theta(s) = sum_{k>=1} B_2k s^(2k-2)/(2k)!
    return np.array([float(bernoulli_fraction(2 * k) / math.factorial(2 * k)) for k in range(1, 21)])


_THETA_COEF = _theta_coef()
_THETA_SERIES_CUT = 2.0


def stirling_theta(s):
    """theta(s) = (1/s)(1/(e^s - 1) - 1/s + 1/2); 1/12 at 0+, decreasing, positive.

    The Bernoulli series is used below s = 2, where the direct form loses
    digits to cancellation.
    """
    sa = _as_positive(s, "s")
    out = np.empty_like(sa)
    lo = sa < _THETA_SERIES_CUT
    s2 = sa[lo] ** 2
    acc = np.zeros_like(s2)
    for c in _THETA_COEF[::-1]:
        acc = acc * s2 + c
    out[lo] = acc
    sh = sa[~lo]
    out[~lo] = (recip_expm1(sh) - 1.0 / sh + 0.5) / sh
    return _unwrap(out, s)


def binet_ln_gamma1p(z: float) -> float:
    """ln Gamma(1+z) from the Stirling-remainder integral (quadrature).

    (z + 1/2) ln z - z + ln(2 pi)/2 + int_0^inf theta(s) e^(-zs) ds.
    Independent of the direct evaluation; useful as a cross-check.
    """
    z = float(_as_positive(z, "z"))
    integral, _ = integrate.quad(lambda s: stirling_theta(s) * math.exp(-z * s), 0, np.inf,
                                 epsabs=1e-15, epsrel=1e-13, limit=200)
    return (z + 0.5) * math.log(z) - z + 0.5 * math.log(2 * math.pi) + integral


# ---------------------------------------------------------------------------
# tensor conjecture functions


def conjecture_eval(t, spec: ConjectureSpec, k: int = 0):
    """k-th derivative of L1/L2 (trigamma combinations) or ln R1/ln R2.

    L: sum c w^(theta+k) psi^(k+1)(1 + w t).
    ln R: sum c w^(theta+k) psi^(k-1)(1 + w t), k = 0 giving ln R itself.
    """
    k = _check_order(k, MAX_CONJECTURE_ORDER, "conjecture derivative")
    w, c = spec.weights()
    order = k + 1 if spec.variant.startswith("L") else k - 1
    return _combo(t, w, c, spec.theta + k, order)


def conjecture_scale(t, spec: ConjectureSpec, k: int = 0):
    k = _check_order(k, MAX_CONJECTURE_ORDER, "conjecture derivative")
    w, c = spec.weights()
    order = k + 1 if spec.variant.startswith("L") else k - 1
    return _combo_scale(t, w, c, spec.theta + k, order)
