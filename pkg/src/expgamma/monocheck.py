"""Grid-based property checks with witness reporting.

Every check samples a function on a :class:`GridSpec` (or on explicit
sample pairs) and returns a :class:`CheckReport`.  Functions passed in are
called with a 1-D float array; scalar-only callables are detected and
evaluated point by point.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from .errors import EvaluationError, PreconditionError

log = logging.getLogger(__name__)

DEFAULT_TOL_REL = 1e-9
DEFAULT_TOL_ABS = 1e-12

__all__ = [
    "GridSpec",
    "Witness",
    "CheckReport",
    "SignChanges",
    "check_sign_pattern",
    "check_convex",
    "check_star_shaped",
    "check_superadditive",
    "check_ratio_monotone",
    "count_sign_changes",
    "refine_root",
]


@dataclass(frozen=True)
class GridSpec:
    lo: float = 1e-3
    hi: float = 1e3
    points: int = 1000
    spacing: str = "log"
    tol_rel: float = DEFAULT_TOL_REL
    tol_abs: float = DEFAULT_TOL_ABS

    def __post_init__(self):
        if not (0 < self.lo < self.hi):
            raise ValueError(f"grid needs 0 < lo < hi, got lo={self.lo}, hi={self.hi}")
        if self.points < 3:
            raise ValueError(f"grid needs at least 3 points, got {self.points}")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")

    @classmethod
    def default(cls, **overrides) -> "GridSpec":
        """Log grid over [1e-3, 1e3], bounds overridable by environment.

        ``EXPGAMMA_GRID_LO`` / ``EXPGAMMA_GRID_HI`` replace the bounds when
        set; explicit keyword overrides win over both.
        """
        env = {}
        if "EXPGAMMA_GRID_LO" in os.environ:
            env["lo"] = float(os.environ["EXPGAMMA_GRID_LO"])
        if "EXPGAMMA_GRID_HI" in os.environ:
            env["hi"] = float(os.environ["EXPGAMMA_GRID_HI"])
        return cls(**{**env, **overrides})

    def nodes(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


class Witness(NamedTuple):
    abscissa: float | tuple
    value: float
    threshold: float
    order: int | None = None


@dataclass
class CheckReport:
    property_id: str
    witnesses: list = field(default_factory=list)
    checked_points: int = 0

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witnesses"] = [w._asdict() if hasattr(w, "_asdict") else w for w in self.witnesses]
        d["passed"] = self.passed
        return d

    def __str__(self):
        status = "PASS" if self.passed else f"FAIL ({len(self.witnesses)} witnesses)"
        return f"{self.property_id}: {status} over {self.checked_points} points"


class SignChanges(NamedTuple):
    count: int
    brackets: list


def _evaluate(f, x, label=""):
    """Evaluate ``f`` on array ``x``; fall back to a scalar loop if needed."""
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).astype(float) if y.ndim == 0 else None
    except Exception:
        y = None
    if y is None:
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            try:
                out[i] = float(f(float(xi)))
            except Exception as exc:
                raise EvaluationError(f"evaluation failed at t={xi!r}{label}: {exc}") from exc
        y = out
    bad = ~np.isfinite(y) & ~np.isinf(y)
    if bad.any():
        i = int(np.argmax(bad))
        raise EvaluationError(f"function returned NaN at t={x[i]!r}{label}")
    return y


def _tolerance(grid, scale):
    return grid.tol_abs + grid.tol_rel * np.abs(scale)


def check_sign_pattern(
    derivs: Callable, max_order: int, grid: GridSpec, *, scale: Callable | None = None,
    property_id: str = "sign_pattern",
) -> CheckReport:
    """Check ``(-1)^k derivs(t, k) >= -tol`` for ``k = 0..max_order``.

    This is the finite-order certificate of complete monotonicity.  ``scale``
    (same signature as ``derivs``) sets the magnitude the relative tolerance
    applies to; it defaults to the value itself.
    """
    t = grid.nodes()
    report = CheckReport(property_id, checked_points=t.size * (max_order + 1))
    for k in range(max_order + 1):
        v = _evaluate(lambda x: derivs(x, k), t, f", k={k}")
        sv = (-1) ** k * v
        mag = _evaluate(lambda x: scale(x, k), t, f", k={k}") if scale else v
        thr = -_tolerance(grid, mag)
        for i in np.nonzero(sv < thr)[0]:
            report.witnesses.append(Witness(float(t[i]), float(sv[i]), float(thr[i]), k))
    return report


def check_convex(f: Callable, grid: GridSpec, *, property_id: str = "convex") -> CheckReport:
    """Three-point second differences (exact for quadratics on uneven grids)."""
    x = grid.nodes()
    y = _evaluate(f, x)
    h0 = np.diff(x)[:-1]
    h1 = np.diff(x)[1:]
    d2 = 2.0 * ((y[2:] - y[1:-1]) / h1 - (y[1:-1] - y[:-2]) / h0) / (h0 + h1)
    mag = 2.0 * (np.abs(y[2:]) / h1 + np.abs(y[1:-1]) * (1 / h0 + 1 / h1) + np.abs(y[:-2]) / h0)
    mag /= h0 + h1
    thr = -_tolerance(grid, mag)
    report = CheckReport(property_id, checked_points=x.size)
    for i in np.nonzero(d2 < thr)[0]:
        report.witnesses.append(Witness(float(x[i + 1]), float(d2[i]), float(thr[i])))
    return report


def check_star_shaped(
    f: Callable, grid: GridSpec, nus: Sequence[float], *, property_id: str = "star_shaped"
) -> CheckReport:
    """Check ``f(nu t) <= nu f(t) + tol`` for every grid ``t`` and listed ``nu``."""
    t = grid.nodes()
    ft = _evaluate(f, t)
    report = CheckReport(property_id, checked_points=t.size * len(nus))
    for nu in nus:
        if not 0 < nu <= 1:
            raise PreconditionError(f"nu must lie in (0, 1], got {nu}")
        lhs = _evaluate(f, nu * t, f", nu={nu}")
        rhs = nu * ft
        excess = lhs - rhs
        thr = _tolerance(grid, np.maximum(np.abs(lhs), np.abs(rhs)))
        for i in np.nonzero(excess > thr)[0]:
            report.witnesses.append(Witness((float(nu), float(t[i])), float(excess[i]), float(thr[i])))
    return report


def check_superadditive(
    f: Callable,
    sample_pairs,
    *,
    tol_rel: float = DEFAULT_TOL_REL,
    tol_abs: float = DEFAULT_TOL_ABS,
    property_id: str = "superadditive",
) -> CheckReport:
    """Check ``f(s + t) >= f(s) + f(t) - tol`` for each pair."""
    pairs = np.asarray(sample_pairs, dtype=float).reshape(-1, 2)
    s, t = pairs[:, 0], pairs[:, 1]
    fs, ft, fst = _evaluate(f, s), _evaluate(f, t), _evaluate(f, s + t)
    deficit = fs + ft - fst
    thr = tol_abs + tol_rel * np.maximum(np.abs(fst), np.abs(fs) + np.abs(ft))
    report = CheckReport(property_id, checked_points=len(pairs))
    for i in np.nonzero(deficit > thr)[0]:
        report.witnesses.append(Witness((float(s[i]), float(t[i])), float(-deficit[i]), float(-thr[i])))
    return report


def check_ratio_monotone(
    U: Callable,
    V: Callable,
    a: float,
    b: float,
    grid: GridSpec,
    *,
    decreasing: bool = True,
    property_id: str = "ratio_monotone",
) -> CheckReport:
    """Monotone form of the l'Hospital-type rule on ``(a, b)``.

    With ``U'/V'`` decreasing (the caller's hypothesis), both
    ``(U(t)-U(a))/(V(t)-V(a))`` and ``(U(t)-U(b))/(V(t)-V(b))`` must be
    nonincreasing.  Pass ``decreasing=False`` for the mirrored statement.
    Only grid nodes strictly inside ``(a, b)`` are used.
    """
    t = grid.nodes()
    t = t[(t > a) & (t < b)]
    if t.size < 3:
        raise PreconditionError(f"fewer than 3 grid nodes inside ({a}, {b})")
    vt = _evaluate(V, t)
    dv = np.diff(vt)
    if not (np.all(dv > 0) or np.all(dv < 0)):
        raise PreconditionError("V is not strictly monotone on the grid, so V' vanishes somewhere")
    ut = _evaluate(U, t)
    sign = 1.0 if decreasing else -1.0
    report = CheckReport(property_id, checked_points=2 * t.size)
    for endpoint in (a, b):
        ue = float(_evaluate(U, np.array([float(endpoint)]))[0])
        ve = float(_evaluate(V, np.array([float(endpoint)]))[0])
        den = vt - ve
        keep = np.abs(den) >= grid.tol_abs
        if not keep.all():
            log.info("ratio check: skipped %d nodes with |V(t)-V(%g)| < tol_abs", (~keep).sum(), endpoint)
        tk = t[keep]
        r = (ut[keep] - ue) / den[keep]
        step = sign * np.diff(r)
        thr = _tolerance(grid, np.maximum(np.abs(r[1:]), np.abs(r[:-1])))
        for i in np.nonzero(step > thr)[0]:
            report.witnesses.append(Witness((float(endpoint), float(tk[i + 1])), float(step[i]), float(thr[i])))
    return report


def count_sign_changes(f: Callable, grid: GridSpec) -> SignChanges:
    """Count strict sign alternations of ``f`` over the grid.

    Values with ``|f| < tol_abs`` take the sign of the nearest non-tiny
    neighbour, so they never create changes themselves; an exact zero at a
    node closes the bracket on its left.  Brackets are ``(lo, hi)`` node
    pairs on which ``f`` changes sign.
    """
    x = grid.nodes()
    y = _evaluate(f, x)
    big = np.nonzero((np.abs(y) >= grid.tol_abs) & (y != 0.0))[0]
    brackets = []
    for i, j in zip(big[:-1], big[1:]):
        if np.sign(y[i]) == np.sign(y[j]):
            continue
        zeros = np.nonzero(y[i + 1 : j] == 0.0)[0]
        hi = x[i + 1 + zeros[0]] if zeros.size else x[j]
        brackets.append((float(x[i]), float(hi)))
    return SignChanges(len(brackets), brackets)


def refine_root(f: Callable, lo: float, hi: float, rtol: float = 1e-12) -> float:
    """Bisection on a sign-change bracket, relative abscissa tolerance ``rtol``."""
    g = lambda t: float(f(t))
    flo, fhi = g(lo), g(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise PreconditionError(f"[{lo}, {hi}] is not a sign-change bracket")
    return optimize.bisect(g, lo, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps), maxiter=2000)
