"""Exponential-sum inequalities over positive weights, matrices and tensors.

Every inequality here compares sums of terms

    f_e(w) = w^e / (e^(x/w) - 1)

with aggregated weights on the left and the raw weights on the right.  Two
exponent conventions are used and kept fixed at the API boundary:

* :func:`margin_sum_split` uses ``e = alpha``::

      (sum lambda)^alpha / (e^(x/sum lambda) - 1) >= rho * sum lambda_k^alpha / (e^(x/lambda_k) - 1)

  (rho defaults to 1; alpha = 0 is the plain Bernoulli-kernel split,
  alpha = 2 the squared one);
* the matrix and tensor margins use ``e = alpha - 1``, the form in which
  the ``alpha >= 1`` guarantees are stated (rho defaults to 2 for matrices
  and 3 for tensors).

:func:`sweep` searches random instances for violations with a
counter-based generator keyed by ``(seed, sample index)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import mpmath as mp
import numpy as np

from .errors import DomainError, InputError
from .specfun import log_recip_expm1, recip_expm1

__all__ = [
    "LambdaMatrix",
    "LambdaTensor",
    "Margin",
    "margin_sum_split",
    "margin_matrix",
    "margin_tensor_2to1",
    "margin_tensor_1to2",
    "reduction_check",
    "SweepConfig",
    "SweepReport",
    "sweep",
    "INEQUALITIES",
]

VIOLATION_TOL = 1e-9
ABS_FLOOR = 1e-300

# inequality id -> (weight-array rank, exponent offset, default rho)
INEQUALITIES = {
    "sum_split": (1, 0.0, 1.0),
    "matrix": (2, -1.0, 2.0),
    "tensor_2to1": (3, -1.0, 3.0),
    "tensor_1to2": (3, -1.0, 3.0),
}


def _positive_array(data, ndim, name):
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(name, f"not a numeric array ({exc})") from None
    if arr.ndim != ndim or arr.size == 0:
        raise InputError(name, f"expected a nonempty {ndim}-d array, got shape {arr.shape}")
    bad = ~np.isfinite(arr) | (arr <= 0)
    if bad.any():
        idx = "".join(f"[{i}]" for i in np.argwhere(bad)[0])
        raise InputError(f"{name}{idx}", f"must be a finite positive number, got {float(arr[bad][0])!r}")
    arr.setflags(write=False)
    return arr


class LambdaMatrix:
    """Strictly positive m x n weights; row sums ``nu`` and column sums ``tau``."""

    def __init__(self, entries):
        self._entries = _positive_array(entries, 2, "lambda")

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def shape(self):
        return self._entries.shape

    @property
    def nu(self) -> np.ndarray:
        return self._entries.sum(axis=1)

    @property
    def tau(self) -> np.ndarray:
        return self._entries.sum(axis=0)

    def transpose(self) -> "LambdaMatrix":
        return LambdaMatrix(self._entries.T)

    @classmethod
    def from_json(cls, obj) -> "LambdaMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or "lambda" not in obj:
            raise InputError("lambda", "missing key")
        return cls(obj["lambda"])

    def to_json(self) -> str:
        return json.dumps({"lambda": self._entries.tolist()})

    def __repr__(self):
        return f"LambdaMatrix({self._entries.tolist()!r})"


class LambdaTensor:
    """Strictly positive l x m x n weights with their partial-sum families.

    ``single_sums`` collapses one index: ``(sum_i, sum_j, sum_k)`` with shapes
    ``(m, n), (l, n), (l, m)``.  ``double_sums`` collapses two and keeps one:
    ``(keep k, keep i, keep j)`` with shapes ``(n,), (l,), (m,)``.
    """

    def __init__(self, entries):
        self._entries = _positive_array(entries, 3, "lambda3")

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def shape(self):
        return self._entries.shape

    @property
    def single_sums(self):
        e = self._entries
        return e.sum(axis=0), e.sum(axis=1), e.sum(axis=2)

    @property
    def double_sums(self):
        e = self._entries
        return e.sum(axis=(0, 1)), e.sum(axis=(1, 2)), e.sum(axis=(0, 2))

    @property
    def total(self) -> float:
        return float(self._entries.sum())

    @classmethod
    def from_json(cls, obj) -> "LambdaTensor":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or "lambda3" not in obj:
            raise InputError("lambda3", "missing key")
        return cls(obj["lambda3"])

    def to_json(self) -> str:
        return json.dumps({"lambda3": self._entries.tolist()})

    def __repr__(self):
        return f"LambdaTensor({self._entries.tolist()!r})"


@dataclass(frozen=True)
class Margin:
    """``lhs - rhs`` of one inequality instance.

    When the sides under- or overflow double range they are stored divided
    by ``exp(log_scale)``; ``relative_margin`` is scale free either way.
    """

    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    log_scale: float = 0.0

    @classmethod
    def from_sides(cls, lhs, rhs, log_scale=0.0, abs_floor=ABS_FLOOR):
        m = lhs - rhs
        return cls(float(lhs), float(rhs), float(m),
                   float(m / max(abs(lhs), abs(rhs), abs_floor)), float(log_scale))

    def to_dict(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# aggregation patterns, batched over a leading sample axis


def _groups(ineq_id, lam):
    """(lhs weight blocks, rhs weight blocks), each block of shape (N, k)."""
    n = lam.shape[0]
    flat = lam.reshape(n, -1)
    if ineq_id == "sum_split":
        return [flat.sum(axis=1, keepdims=True)], [flat]
    if ineq_id == "matrix":
        return [lam.sum(axis=2), lam.sum(axis=1)], [flat]
    if ineq_id == "tensor_2to1":
        blocks = [lam.sum(axis=a).reshape(n, -1) for a in (1, 2, 3)]
        return blocks, [flat]
    if ineq_id == "tensor_1to2":
        blocks = [lam.sum(axis=a) for a in ((1, 2), (2, 3), (1, 3))]
        return blocks, [flat]
    raise InputError("ineq", f"unknown inequality {ineq_id!r}; choose from {sorted(INEQUALITIES)}")


def _exponent(ineq_id, alpha):
    return float(alpha) + INEQUALITIES[ineq_id][1]


def _check_x(x):
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"x must be a finite positive real, got {x}")
    return x


def _scalar_margin(ineq_id, lam, x, alpha, rho):
    x = _check_x(x)
    e = _exponent(ineq_id, alpha)
    lhs_b, rhs_b = _groups(ineq_id, lam[None])
    wl = np.concatenate([b.ravel() for b in lhs_b])
    wr = np.concatenate([b.ravel() for b in rhs_b])
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        tl = wl**e * recip_expm1(x / wl)
        tr = wr**e * recip_expm1(x / wr)
    lhs = math.fsum(tl)
    rhs = rho * math.fsum(tr)
    big = max(abs(lhs), abs(rhs))
    if math.isfinite(lhs) and math.isfinite(rhs) and 1e-280 < big < 1e280:
        return Margin.from_sides(lhs, rhs)
    ll = e * np.log(wl) + log_recip_expm1(x / wl)
    lr = e * np.log(wr) + log_recip_expm1(x / wr)
    shift = float(max(ll.max(), lr.max()))
    lhs = math.fsum(np.exp(ll - shift))
    rhs = rho * math.fsum(np.exp(lr - shift))
    return Margin.from_sides(lhs, rhs, log_scale=shift)


def _rho(ineq_id, rho):
    return INEQUALITIES[ineq_id][2] if rho is None else float(rho)


def margin_sum_split(x: float, lambdas, alpha: float, rho: float | None = None) -> Margin:
    """(sum lambda)^alpha/(e^(x/sum lambda)-1) - rho * sum lambda_k^alpha/(e^(x/lambda_k)-1)."""
    lam = _positive_array(lambdas, 1, "lambdas")
    return _scalar_margin("sum_split", lam, x, alpha, _rho("sum_split", rho))


def margin_matrix(x: float, lm: LambdaMatrix, alpha: float, rho: float = 2.0) -> Margin:
    """sum_i f(nu_i) + sum_j f(tau_j) - rho * sum_ij f(lambda_ij), f = f_(alpha-1)."""
    return _scalar_margin("matrix", lm.entries, x, alpha, float(rho))


def margin_tensor_2to1(x: float, lt: LambdaTensor, alpha: float, rho: float = 3.0) -> Margin:
    """Three single-index partial-sum families against rho * the full triple sum."""
    return _scalar_margin("tensor_2to1", lt.entries, x, alpha, float(rho))


def margin_tensor_1to2(x: float, lt: LambdaTensor, alpha: float, rho: float = 3.0) -> Margin:
    """Three double-index partial-sum families against rho * the full triple sum."""
    return _scalar_margin("tensor_1to2", lt.entries, x, alpha, float(rho))


def reduction_check(lm_base, eps: float, x: float, alpha: float) -> tuple[Margin, Margin]:
    """Degenerate-matrix limit of the matrix inequality.

    Builds the n x n matrix with first row and column ``lm_base`` and ``eps``
    elsewhere.  As eps -> 0 its rho=2 margin tends to twice the sum-split
    margin with exponent ``alpha - 1``, so the first returned Margin is the
    matrix margin halved and the second is
    ``margin_sum_split(x, lm_base, alpha - 1)``.
    """
    base = _positive_array(lm_base, 1, "lm_base")
    if not 0 < eps <= 1e-6:
        raise DomainError(f"eps must lie in (0, 1e-6], got {eps}")
    n = base.size
    mat = np.full((n, n), float(eps))
    mat[0, :] = base
    mat[:, 0] = base
    mm = margin_matrix(x, LambdaMatrix(mat), alpha, rho=2.0)
    half = Margin.from_sides(mm.lhs / 2, mm.rhs / 2, mm.log_scale)
    return half, margin_sum_split(x, base, alpha - 1.0)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    ineq_id: str = "matrix"
    dims: tuple = (2, 2)
    samples: int = 1000
    seed: int = 0
    alpha: float = 1.0
    rho: float | None = None
    lambda_range: tuple = (1e-3, 1e3)
    x_range: tuple = (1e-3, 1e3)
    tolerance: float = VIOLATION_TOL
    frontier_alphas: tuple = ()
    frontier_rhos: tuple = ()

    def __post_init__(self):
        if self.ineq_id not in INEQUALITIES:
            raise InputError("ineq", f"unknown inequality {self.ineq_id!r}; choose from {sorted(INEQUALITIES)}")
        rank = INEQUALITIES[self.ineq_id][0]
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != rank or any(d < 1 for d in dims):
            raise InputError("dims", f"{self.ineq_id} needs {rank} positive dimensions, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        if int(self.samples) < 1:
            raise InputError("samples", f"must be >= 1, got {self.samples}")
        for name in ("lambda_range", "x_range"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not (0 < lo < hi and math.isfinite(hi)):
                raise InputError(name, f"need 0 < lo < hi, got ({lo}, {hi})")
            object.__setattr__(self, name, (lo, hi))
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed", f"must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "frontier_alphas", tuple(float(a) for a in self.frontier_alphas))
        object.__setattr__(self, "frontier_rhos", tuple(float(r) for r in self.frontier_rhos))

    @property
    def effective_rho(self) -> float:
        return _rho(self.ineq_id, self.rho)

    @property
    def frontier(self) -> bool:
        return bool(self.frontier_alphas or self.frontier_rhos)

    def to_dict(self):
        d = asdict(self)
        d["rho"] = self.effective_rho
        for k in ("dims", "lambda_range", "x_range", "frontier_alphas", "frontier_rhos"):
            d[k] = list(d[k])
        return d


@dataclass
class SweepReport:
    config: dict
    violations: list = field(default_factory=list)
    min_relative_margin: float = math.inf
    argmin_index: int = -1
    samples_run: int = 0
    frontier_points: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {
            "config": self.config,
            "violations": self.violations,
            "min_relative_margin": self.min_relative_margin,
            "argmin_index": self.argmin_index,
            "samples_run": self.samples_run,
            "frontier_points": self.frontier_points,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def draw_sample(config: SweepConfig, index: int):
    """The (lambda array, x) of sample ``index``; independent of any other draw."""
    g = np.random.Generator(np.random.Philox(key=np.array([int(config.seed), int(index)], dtype=np.uint64)))
    size = math.prod(config.dims)
    u = g.random(size + 1)
    llo, lhi = np.log(config.lambda_range)
    xlo, xhi = np.log(config.x_range)
    lam = np.exp(llo + u[:size] * (lhi - llo)).reshape(config.dims)
    x = float(np.exp(xlo + u[size] * (xhi - xlo)))
    return lam, x


def _draw_block(config, start, stop):
    lams = np.empty((stop - start, *config.dims))
    xs = np.empty(stop - start)
    for j, idx in enumerate(range(start, stop)):
        lams[j], xs[j] = draw_sample(config, idx)
    return lams, xs


def _batch_log_terms(blocks, x, e):
    out = []
    for b in blocks:
        out.append(e * np.log(b) + log_recip_expm1(x[:, None] / b))
    return np.concatenate(out, axis=1)


def _batch_relative_margins(ineq_id, lams, xs, alpha, rho):
    e = _exponent(ineq_id, alpha)
    lhs_b, rhs_b = _groups(ineq_id, lams)
    ll = _batch_log_terms(lhs_b, xs, e)
    lr = _batch_log_terms(rhs_b, xs, e)
    shift = np.maximum(ll.max(axis=1), lr.max(axis=1))[:, None]
    lhs = np.exp(ll - shift).sum(axis=1)
    rhs = rho * np.exp(lr - shift).sum(axis=1)
    return (lhs - rhs) / np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), ABS_FLOOR)


def precise_margin(ineq_id, lam, x, alpha, rho, dps=50) -> Margin:
    """Margin of one instance in extended precision (mpmath)."""
    e = mp.mpf(_exponent(ineq_id, alpha))
    with mp.workdps(dps):
        ent = np.vectorize(mp.mpf, otypes=[object])(np.asarray(lam, dtype=float))
        lhs_b, rhs_b = _groups(ineq_id, ent[None])
        xm = mp.mpf(x)
        f = lambda w: w**e / mp.expm1(xm / w)
        lhs = mp.fsum(f(w) for b in lhs_b for w in np.ravel(b))
        rhs = mp.mpf(rho) * mp.fsum(f(w) for b in rhs_b for w in np.ravel(b))
        big = max(abs(lhs), abs(rhs))
        if big == 0:
            return Margin.from_sides(0.0, 0.0)
        if mp.mpf("1e-280") < big < mp.mpf("1e280"):
            return Margin(float(lhs), float(rhs), float(lhs - rhs), float((lhs - rhs) / big))
        shift = mp.log(big)
        scale = mp.exp(shift)
        return Margin(float(lhs / scale), float(rhs / scale), float((lhs - rhs) / scale),
                      float((lhs - rhs) / big), float(shift))


_CHUNK = 8192


def sweep(config: SweepConfig) -> SweepReport:
    """Randomized violation search (and optional empirical frontier).

    Sample ``i`` draws its weights and ``x`` log-uniformly from a Philox
    stream keyed by ``(seed, i)``.  Margins are evaluated in log-scaled
    double precision; any sample with relative margin below ``-tolerance`` is
    re-evaluated with mpmath and reported only if the violation persists.

    In frontier mode the same samples are scored for every (alpha, rho) on
    the grid ``frontier_alphas x frontier_rhos`` (missing axes default to
    the base value) and the worst relative margin per grid point is kept.
    """
    ineq, rho = config.ineq_id, config.effective_rho
    report = SweepReport(config=config.to_dict())
    flagged = []
    alphas = config.frontier_alphas or (config.alpha,)
    rhos = config.frontier_rhos or (rho,)
    frontier = {(a, r): [math.inf, 0] for a in alphas for r in rhos} if config.frontier else {}
    for start in range(0, config.samples, _CHUNK):
        stop = min(start + _CHUNK, config.samples)
        lams, xs = _draw_block(config, start, stop)
        rel = _batch_relative_margins(ineq, lams, xs, config.alpha, rho)
        i = int(np.argmin(rel))
        if rel[i] < report.min_relative_margin:
            report.min_relative_margin, report.argmin_index = float(rel[i]), start + i
        flagged.extend(int(start + j) for j in np.nonzero(rel < -config.tolerance)[0])
        for (a, r), slot in frontier.items():
            fr = _batch_relative_margins(ineq, lams, xs, a, r)
            slot[0] = min(slot[0], float(fr.min()))
            slot[1] += int(np.count_nonzero(fr < -config.tolerance))
    report.samples_run = config.samples
    for idx in flagged:
        lam, x = draw_sample(config, idx)
        m = precise_margin(ineq, lam, x, config.alpha, rho)
        if m.relative_margin < -config.tolerance:
            report.violations.append(
                {"index": idx, "x": x, "lambda": lam.tolist(), "margin": m.to_dict()}
            )
    report.frontier_points = [
        {"alpha": a, "rho": r, "worst_relative_margin": w, "flagged": c}
        for (a, r), (w, c) in frontier.items()
    ]
    return report
