"""Real-argument special functions.

Log-gamma, polygamma of any order up to 32, Bernoulli numbers, the
q-gamma function and a cancellation-free kernel for ``1/(e^x - 1)``.
Everything here is a pure function of its inputs; array arguments are
accepted wherever a scalar ``x`` is documented and evaluated elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as _sp

from .errors import ConvergenceError, DomainError, UnsupportedOrderError

__all__ = [
    "EULER_GAMMA",
    "ZETA2",
    "Accuracy",
    "QParam",
    "ln_gamma",
    "polygamma",
    "bernoulli_number",
    "bernoulli_fraction",
    "recip_expm1",
    "log_recip_expm1",
    "q_ln_gamma",
]

EULER_GAMMA = 0.57721566490153286061
ZETA2 = math.pi**2 / 6

MAX_POLYGAMMA_ORDER = 32
MAX_BERNOULLI_INDEX = 60

# below: series 1/x - 1/2 + x/12 - ...; above: e^{-x}/(1 - e^{-x})
_RECIP_SERIES_CUT = 1e-5
# expm1 overflows just above 709.78
_RECIP_TAIL_CUT = 700.0


@dataclass(frozen=True)
class Accuracy:
    rel_tol: float = 1e-12
    abs_floor: float = 1e-300
    series_cap: int = 200

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_floor >= 0:
            raise ValueError(f"abs_floor must be nonnegative, got {self.abs_floor}")
        if self.series_cap < 1:
            raise ValueError(f"series_cap must be >= 1, got {self.series_cap}")


@dataclass(frozen=True)
class QParam:
    """Base of the q-deformation; ``q == 1`` is the classical gamma."""

    q: float

    def __post_init__(self):
        if not (math.isfinite(self.q) and self.q > 0):
            raise DomainError(f"q must be a finite positive real, got {self.q}")


def _as_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    if np.any(arr <= 0):
        raise DomainError(f"{name} must be > 0, got {x!r}")
    return arr


def _unwrap(arr, like):
    return float(np.ravel(arr)[0]) if np.ndim(like) == 0 else arr


# ---------------------------------------------------------------------------
# Bernoulli numbers


@lru_cache(maxsize=1)
def _bernoulli_table():
    # sum_{k=0}^{n} C(n+1, k) B_k = 0, B_0 = 1  (so B_1 = -1/2)
    table = [Fraction(1)]
    for n in range(1, MAX_BERNOULLI_INDEX + 1):
        acc = sum(math.comb(n + 1, k) * table[k] for k in range(n))
        table.append(-acc / (n + 1))
    return tuple(table)


def bernoulli_fraction(n: int) -> Fraction:
    """Exact B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise DomainError(f"Bernoulli index must be >= 0, got {n}")
    if n > MAX_BERNOULLI_INDEX:
        raise UnsupportedOrderError(
            f"Bernoulli index {n} exceeds the supported maximum {MAX_BERNOULLI_INDEX}"
        )
    return _bernoulli_table()[n]


def bernoulli_number(n: int) -> float:
    """B_n as the correctly rounded double."""
    return float(bernoulli_fraction(n))


@lru_cache(maxsize=None)
def _asymptotic_coefficients(n):
    # B_2k (2k+n-1)!/(2k)!, k = 1..15
    tab = _bernoulli_table()
    return np.array(
        [
            float(tab[2 * k] * Fraction(math.factorial(2 * k + n - 1), math.factorial(2 * k)))
            for k in range(1, 16)
        ]
    )


@lru_cache(maxsize=1)
def _even_bernoulli_floats():
    # B_2, B_4, ..., B_30
    return np.array([float(_bernoulli_table()[2 * k]) for k in range(1, 16)])


# ---------------------------------------------------------------------------
# 1/(e^x - 1)


def recip_expm1(x):
    """Return ``1/(e^x - 1)`` for ``x > 0`` without cancellation or overflow.

    Very large arguments underflow gracefully to 0.
    """
    xa = _as_positive(x)
    out = np.empty_like(xa)
    small = xa < _RECIP_SERIES_CUT
    tail = xa > _RECIP_TAIL_CUT
    mid = ~(small | tail)
    xs = xa[small]
    out[small] = 1.0 / xs - 0.5 + xs / 12.0
    out[mid] = 1.0 / np.expm1(xa[mid])
    with np.errstate(under="ignore"):
        et = np.exp(-xa[tail])
    out[tail] = et / (1.0 - et)
    return _unwrap(out, x)


def log_recip_expm1(x):
    """``log(1/(e^x - 1))``, finite for every positive finite ``x``."""
    xa = _as_positive(x)
    out = np.empty_like(xa)
    low = xa <= 1.0
    out[low] = -np.log(np.expm1(xa[low]))
    xh = xa[~low]
    with np.errstate(under="ignore"):
        out[~low] = -xh - np.log1p(-np.exp(-xh))
    return _unwrap(out, x)


# ---------------------------------------------------------------------------
# Gamma family


def ln_gamma(x):
    """log Gamma(x) for x > 0."""
    xa = _as_positive(x)
    return _unwrap(_sp.gammaln(xa), x)


def _shift_threshold(n):
    return 10.0 + 1.25 * n


def polygamma(n: int, x):
    """psi^(n)(x) for integer ``0 <= n <= 32`` and ``x > 0``.

    The argument is shifted upward with the recurrence
    psi^(n)(x+1) = psi^(n)(x) + (-1)^n n!/x^(n+1) until it exceeds
    ``10 + 1.25 n``, then the asymptotic expansion with B_2..B_30 is summed.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"polygamma order must be a nonnegative integer, got {n}")
    n = int(n)
    if n > MAX_POLYGAMMA_ORDER:
        raise UnsupportedOrderError(
            f"polygamma order {n} exceeds the supported maximum {MAX_POLYGAMMA_ORDER}"
        )
    xa = _as_positive(x).copy()
    x0 = _shift_threshold(n)

    # sum of x^-(n+1) over the shifted-away points, smallest terms first
    steps = np.maximum(np.ceil(x0 - xa), 0.0)
    nsteps = int(steps.max()) if steps.size else 0
    shift = np.zeros_like(xa)
    for j in range(nsteps - 1, -1, -1):
        active = steps > j
        if n == 0:
            shift[active] += 1.0 / (xa[active] + j)
        else:
            shift[active] += (xa[active] + j) ** -(n + 1)
    z = xa + steps

    b2k = _even_bernoulli_floats()
    k = np.arange(1, b2k.size + 1)
    if n == 0:
        coef = b2k / (2 * k)
        zi2 = 1.0 / (z * z)
        series = np.zeros_like(z)
        for c in coef[::-1]:
            series = (series + c) * zi2
        out = np.log(z) - 0.5 / z - series - shift
    else:
        coef = _asymptotic_coefficients(n)
        zi2 = 1.0 / (z * z)
        series = np.zeros_like(z)
        for c in coef[::-1]:
            series = (series + c) * zi2
        nfact = math.factorial(n)
        lead = math.factorial(n - 1) / z**n + 0.5 * nfact / z ** (n + 1) + series / z**n
        sign = 1.0 if n % 2 == 1 else -1.0
        # psi^(n)(x) = psi^(n)(z) - (-1)^n n! * shift
        out = sign * lead + sign * nfact * shift
    return _unwrap(out, x)


# ---------------------------------------------------------------------------
# q-gamma


def _q_product_log(p, x, acc: Accuracy):
    """sum_{i>=0} [log(1 - p^(i+1)) - log(1 - p^(i+x))] for 0 < p < 1."""
    total = 0.0
    start = 0
    chunk = 256
    lp = math.log(p)
    while start < acc.series_cap:
        stop = min(start + chunk, acc.series_cap)
        i = np.arange(start, stop, dtype=float)
        with np.errstate(under="ignore"):
            terms = np.log1p(-np.exp((i + 1) * lp)) - np.log1p(-np.exp((i + x) * lp))
        partial = total + np.cumsum(terms)
        # past i ~ x the terms are geometric with ratio p, so the tail after
        # term i is about terms[i] * p / (1 - p); the scale |log(1 - p)| keeps
        # the test meaningful when the sum itself is near zero
        tail = terms * (p / (1.0 - p))
        scale = np.maximum(np.abs(partial), max(-math.log1p(-p), acc.abs_floor))
        hits = np.nonzero((np.abs(tail) < acc.rel_tol * scale) & (i + 1 >= x))[0]
        if hits.size:
            j = hits[0]
            return float(partial[j] + tail[j])
        total = float(partial[-1])
        start = stop
        chunk *= 2
    raise ConvergenceError(
        f"q-product for p={p}, x={x} not converged within {acc.series_cap} terms"
    )


def q_ln_gamma(q, x: float, acc: Accuracy | None = None) -> float:
    """log Gamma_q(x) from the infinite-product definition.

    ``q`` may be a float or a :class:`QParam`. For ``q > 1`` the product is
    taken in ``1/q`` with the ``q^binom(x, 2)`` prefactor; ``q == 1`` is
    :func:`ln_gamma`.
    """
    acc = acc or Accuracy()
    qv = q.q if isinstance(q, QParam) else QParam(float(q)).q
    x = float(_as_positive(x))
    if qv == 1.0:
        return ln_gamma(x)
    if qv < 1.0:
        return (1.0 - x) * math.log1p(-qv) + _q_product_log(qv, x, acc)
    p = 1.0 / qv
    return (
        (1.0 - x) * math.log(qv - 1.0)
        + 0.5 * x * (x - 1.0) * math.log(qv)
        + _q_product_log(p, x, acc)
    )
