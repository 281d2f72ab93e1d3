"""The family h_alpha(t) = t^(alpha-1) / (e^(1/t) - 1) and its auxiliaries.

h_alpha is t^alpha H(1/t) with H(t) = t/(e^t - 1) the Bernoulli generating
function.  Its convexity (alpha >= 1), inflection structure (alpha < 1) and
log-concavity (alpha >= 0) are decided by a few auxiliary functions of
s = 1/t:

* ``H1(s), H2(s)`` -- the roots of the second-derivative numerator, viewed
  as a quadratic in alpha, are ``3/2 - H1/2`` and ``3/2 - H2/2``, so

      h''(t) = h(t)/t^2 * (alpha - 3/2 + H1(s)/2) * (alpha - 3/2 + H2(s)/2);

* ``logconc_H(s)`` -- (log h)''(t) = (logconc_H(s) - alpha)/t^2.

All of them are assembled here from pieces that never cancel:
``beta(s) = s/(1-e^-s) - 1``, ``w(s) = D(s)/(e^s-1)^2 - 1`` and a handful of
positive-coefficient series used below s = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, RegimeMismatchError
from .monocheck import GridSpec, count_sign_changes, refine_root
from .specfun import _as_positive, _unwrap, bernoulli_fraction, log_recip_expm1, recip_expm1

__all__ = [
    "HDerivs",
    "InflectionReport",
    "h_alpha",
    "h_alpha_derivs",
    "log_h_alpha_d1",
    "log_h_alpha_d2",
    "aux_H1_H2",
    "discriminant_D",
    "series_D",
    "series_D_coefficients",
    "series_E",
    "series_E_coefficients",
    "logconc_H",
    "expected_regime",
    "inflection_points",
    "extremum_point",
]

_SERIES_TERMS = 30
MAX_SERIES_TERMS = 40


# ---------------------------------------------------------------------------
# cancellation-free building blocks, all functions of s = 1/t


@lru_cache(maxsize=1)
def _beta_coef():
    # beta(s) = s/2 + sum_k B_2k s^2k/(2k)!
    return np.array(
        [float(bernoulli_fraction(2 * k) / math.factorial(2 * k)) for k in range(1, 16)]
    )


def _beta(s):
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    lo = s < 0.5
    sl = s[lo]
    s2 = sl * sl
    acc = np.zeros_like(sl)
    for c in _beta_coef()[::-1]:
        acc = (acc + c) * s2
    out[lo] = 0.5 * sl + acc
    sh = s[~lo]
    em = -np.expm1(-sh)
    out[~lo] = (sh - em) / em
    return out


def _poly_tail(s, coefs, start):
    """sum_j coefs[j] s^(start+j) by Horner."""
    acc = np.zeros_like(s)
    for c in coefs[::-1]:
        acc = acc * s + c
    return acc * s**start


@lru_cache(maxsize=1)
def _em1s_coef():
    # e^s - 1 - s = sum_{k>=2} s^k/k!
    return np.array([1.0 / math.factorial(k) for k in range(2, 2 + _SERIES_TERMS)])


@lru_cache(maxsize=1)
def _p3_coef():
    # (s-2)e^s + s + 2 = sum_{k>=3} (k-2) s^k/k!
    return np.array([(k - 2) / math.factorial(k) for k in range(3, 3 + _SERIES_TERMS)])


@lru_cache(maxsize=1)
def _sinh_gap_coef():
    # sinh^2(s/2) - s^2/4 = sum_{k>=2} s^2k / (2 (2k)!), in powers of s^2 from s^4
    return np.array([1.0 / (2 * math.factorial(2 * k)) for k in range(2, 2 + _SERIES_TERMS // 2)])


def _w(s):
    """D(s)/(e^s-1)^2 - 1 = 4 s e^s (e^s - 1 - s)/(e^s - 1)^2 > 0."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    lo = s <= 1.0
    sl = s[lo]
    em1 = np.expm1(sl)
    out[lo] = 4.0 * sl * np.exp(sl) * _poly_tail(sl, _em1s_coef(), 2) / (em1 * em1)
    sh = s[~lo]
    with np.errstate(under="ignore"):
        e = np.exp(-sh)
    out[~lo] = 4.0 * sh * (1.0 - (1.0 + sh) * e) / (1.0 - e) ** 2
    return out


def _g1(s):
    """H1(s) - 3, a sum of two positive terms."""
    w = _w(s)
    return 2.0 * _beta(s) + w / (1.0 + np.sqrt(1.0 + w))


def _g2(s):
    """H2(s) - 1."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    lo = s < 1.0
    sl = s[lo]
    em1 = np.expm1(sl)
    es = em1 + 1.0
    a = 2.0 * sl * es - em1
    sqrt_d = em1 * np.sqrt(1.0 + _w(sl))
    out[lo] = 4.0 * sl * es * _poly_tail(sl, _p3_coef(), 3) / ((a + sqrt_d) * em1)
    sh = s[~lo]
    b = 1.0 + _beta(sh)
    out[~lo] = 2.0 * b - np.sqrt(1.0 + _w(sh)) - 1.0
    return out


def _one_minus_c2(s):
    """1 - (s / (2 sinh(s/2)))^2 >= 0."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    lo = s < 1.0
    sl = s[lo]
    sh2 = np.sinh(0.5 * sl) ** 2
    out[lo] = _poly_tail(sl * sl, _sinh_gap_coef(), 2) / sh2
    sh = s[~lo]
    with np.errstate(under="ignore"):
        c = sh * np.exp(-0.5 * sh) / -np.expm1(-sh)
    out[~lo] = 1.0 - c * c
    return out


def _logconc(s):
    return -_one_minus_c2(s) - 2.0 * _beta(s)


# ---------------------------------------------------------------------------
# public API


class HDerivs(NamedTuple):
    d1: float | np.ndarray
    d2: float | np.ndarray

    @property
    def underflowed(self):
        """True where both derivatives underflowed to zero (t near 0)."""
        return np.logical_and(np.asarray(self.d1) == 0, np.asarray(self.d2) == 0)


def h_alpha(alpha: float, t):
    """t^(alpha-1) / (e^(1/t) - 1), continuous to 0 at t -> 0+."""
    alpha = _check_alpha(alpha)
    ta = np.atleast_1d(_as_positive(t, "t"))
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        out = ta ** (alpha - 1.0) * recip_expm1(1.0 / ta)
        bad = ~np.isfinite(out) | (out == 0)
        if bad.any():
            tb = ta[bad]
            out[bad] = np.exp((alpha - 1.0) * np.log(tb) + log_recip_expm1(1.0 / tb))
    return _unwrap(out, t)


def _check_alpha(alpha):
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError(f"alpha must be finite, got {alpha}")
    return alpha


def _d2_factors(alpha, s):
    return alpha + 0.5 * _g1(s), (alpha - 1.0) + 0.5 * _g2(s)


def h_alpha_derivs(alpha: float, t) -> HDerivs:
    """First and second derivatives of h_alpha in t.

    d1 = h/t * (alpha + beta(1/t)) and
    d2 = h/t^2 * (alpha - 3/2 + H1(1/t)/2)(alpha - 3/2 + H2(1/t)/2).
    Both are 0 where h itself underflows (t below roughly 1/745).
    """
    alpha = _check_alpha(alpha)
    ta = _as_positive(t, "t")
    s = 1.0 / ta
    h = np.asarray(h_alpha(alpha, ta), dtype=float)
    d1 = h / ta * (alpha + _beta(s))
    f1, f2 = _d2_factors(alpha, s)
    d2 = h / ta**2 * f1 * f2
    return HDerivs(_unwrap(d1, t), _unwrap(d2, t))


def _d2_scale(alpha, t):
    """Magnitude of d2 before the cancellation inside its two factors."""
    ta = np.asarray(t, dtype=float)
    s = 1.0 / ta
    h = np.asarray(h_alpha(alpha, ta), dtype=float)
    return h / ta**2 * (abs(alpha) + 0.5 * _g1(s)) * (abs(alpha - 1.0) + 0.5 * _g2(s))


def _d2_sign_function(alpha):
    # same sign as d2 but free of the underflowing factor h/t^2
    def f(t):
        f1, f2 = _d2_factors(alpha, 1.0 / np.asarray(t, dtype=float))
        return f1 * f2

    return f


def log_h_alpha_d1(alpha: float, t):
    """d/dt log h_alpha = (alpha + beta(1/t)) / t."""
    alpha = _check_alpha(alpha)
    ta = _as_positive(t, "t")
    return _unwrap((alpha + _beta(1.0 / ta)) / ta, t)


def log_h_alpha_d2(alpha: float, t):
    """d^2/dt^2 log h_alpha = (logconc_H(1/t) - alpha) / t^2."""
    alpha = _check_alpha(alpha)
    ta = _as_positive(t, "t")
    return _unwrap((_logconc(1.0 / ta) - alpha) / ta**2, t)


def aux_H1_H2(t):
    """``(H1(t), H2(t))`` with H1,2 = [2t e^t +- sqrt(D(t))]/(e^t - 1).

    H1 increases from 3 and H2 from 1 as t runs over (0, inf).
    """
    ta = _as_positive(t, "t")
    h1 = 3.0 + _g1(ta)
    h2 = 1.0 + _g2(ta)
    return _unwrap(h1, t), _unwrap(h2, t)


def discriminant_D(t):
    """D(t) = (4t+1)e^2t - 2(2t^2+2t+1)e^t + 1 = (e^t-1)^2 (1 + w(t)).

    Raises if a negative value is ever produced; D > 0 on (0, inf).
    """
    ta = _as_positive(t, "t")
    with np.errstate(over="ignore"):
        d = np.expm1(ta) ** 2 * (1.0 + _w(ta))
    if np.any(d < 0):
        raise ArithmeticError("negative radicand D(t) < 0 -- implementation bug")
    return _unwrap(d, t)


def series_D_coefficients(terms: int) -> list[Fraction]:
    """Exact coefficients of t^2, t^3, ... in D(t): [2k(2^k - 2k) + 2^k - 2]/k!."""
    _check_terms(terms)
    return [
        Fraction(2 * k * (2**k - 2 * k) + 2**k - 2, math.factorial(k))
        for k in range(2, 2 + terms)
    ]


def series_E_coefficients(terms: int) -> list[Fraction]:
    """Coefficients of t^3, t^4, ... in e^2t + (t^2-3t-2)e^t + t^2 + 3t + 1."""
    _check_terms(terms)
    return [
        Fraction(2 * (2 ** (k - 1) - 1) + k * (k - 4), math.factorial(k))
        for k in range(3, 3 + terms)
    ]


def _check_terms(terms):
    if not 0 <= terms <= MAX_SERIES_TERMS:
        raise DomainError(f"terms must lie in [0, {MAX_SERIES_TERMS}], got {terms}")


def _eval_series(t, coefs, start):
    if abs(t) > 1:
        raise DomainError(f"series only used for |t| <= 1, got {t}")
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * t + float(c)
    return acc * t**start


def series_D(t: float, terms: int = _SERIES_TERMS) -> float:
    """Truncated power series of D(t), ``terms`` terms from t^2 on."""
    return _eval_series(float(t), series_D_coefficients(terms), 2)


def series_E(t: float, terms: int = _SERIES_TERMS) -> float:
    """Truncated power series of e^2t + (t^2-3t-2)e^t + t^2 + 3t + 1 from t^3."""
    return _eval_series(float(t), series_E_coefficients(terms), 3)


def logconc_H(t):
    """[1 + (t^2+2t-2)e^t + (1-2t)e^2t] / (e^t-1)^2: 0 at 0+, decreasing to -inf."""
    ta = _as_positive(t, "t")
    return _unwrap(_logconc(ta), t)


# ---------------------------------------------------------------------------
# roots


@dataclass
class InflectionReport:
    alpha: float
    roots: list = field(default_factory=list)
    brackets: list = field(default_factory=list)
    bracket_width: float = 0.0
    regime: str = "convex"

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "roots": list(self.roots),
            "brackets": [list(b) for b in self.brackets],
            "bracket_width": self.bracket_width,
            "regime": self.regime,
        }


_REGIME_ROOTS = {"convex": 0, "one_inflection": 1, "two_inflections": 2}


def expected_regime(alpha: float) -> str:
    if alpha >= 1:
        return "convex"
    if alpha >= 0:
        return "one_inflection"
    return "two_inflections"


def _default_root_grid():
    return GridSpec.default(points=10_000)


def _check_root_grid(grid):
    if grid.lo > 1e-3 or grid.hi < 1e3 or grid.points < 1000:
        raise DomainError("root search grid must span [1e-3, 1e3] with >= 1000 points")


def inflection_points(alpha: float, grid: GridSpec | None = None) -> InflectionReport:
    """Locate and refine every sign change of h_alpha'' on the grid.

    The root count must match the classification (0 for alpha >= 1, 1 for
    0 <= alpha < 1, 2 for alpha < 0); a mismatch raises
    :class:`RegimeMismatchError`.
    """
    alpha = _check_alpha(alpha)
    grid = grid or _default_root_grid()
    _check_root_grid(grid)
    sign_fn = _d2_sign_function(alpha)
    changes = count_sign_changes(sign_fn, grid)
    regime = expected_regime(alpha)
    if changes.count != _REGIME_ROOTS[regime]:
        raise RegimeMismatchError(
            f"alpha={alpha}: found {changes.count} sign changes of h'' but the "
            f"'{regime}' regime has {_REGIME_ROOTS[regime]}",
            witnesses=changes.brackets,
        )
    g = lambda t: float(sign_fn(np.array([t]))[0])
    roots = [refine_root(g, lo, hi, rtol=1e-12) for lo, hi in changes.brackets]
    width = max((hi - lo for lo, hi in changes.brackets), default=0.0)
    return InflectionReport(alpha, roots, changes.brackets, width, regime)


def extremum_point(alpha: float, grid: GridSpec | None = None) -> float | None:
    """The unique maximiser of h_alpha for alpha < 0; None for alpha >= 0."""
    alpha = _check_alpha(alpha)
    grid = grid or _default_root_grid()
    _check_root_grid(grid)
    f = lambda t: alpha + _beta(1.0 / np.asarray(t, dtype=float))
    changes = count_sign_changes(f, grid)
    expected = 1 if alpha < 0 else 0
    if changes.count != expected:
        raise RegimeMismatchError(
            f"alpha={alpha}: found {changes.count} critical points, expected {expected}",
            witnesses=changes.brackets,
        )
    if not changes.brackets:
        return None
    lo, hi = changes.brackets[0]
    return refine_root(lambda t: float(f(np.array([t]))[0]), lo, hi, rtol=1e-12)
