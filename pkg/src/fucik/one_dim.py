"""One-dimensional theory on the unit interval.

Finite ``p``: the generalised half-period ``pi_p``, the function ``sin_p``,
the eigenvalues ``lambda_{k,p} = (k pi_p)^p`` and the hyperbolic-like curve
families of the asymmetric spectrum.  All finite-``p`` quantities are
carried as ``p``-th roots (``alpha^(1/p)`` and so on) because the linear
values overflow long before ``p`` is large.

``p = infinity``: the limit curves, the piecewise-linear two-bump profile
and a discrete checker for the limit equation

    min{-D_inf u, |u'| - alpha u}   = 0   where u > 0,
    max{-D_inf u, -|u'| + beta |u|} = 0   where u < 0,
    -D_inf u                        = 0   where u = 0,

with ``D_inf u = u'^2 u''`` in one dimension.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DomainError, ValidationError

BRANCHES = ("even", "odd_plus", "odd_minus")


def _exponent(p: float) -> float:
    try:
        p = float(p)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"exponent must be a number, got {p!r}") from exc
    if not p > 1 or math.isnan(p):
        raise DomainError(f"exponent must satisfy p > 1, got {p}")
    return p


# ---------------------------------------------------------------------------
# pi_p and sin_p


def _ratio_root(s: np.ndarray, p: float) -> np.ndarray:
    """``((1 - s) / (1 - s^p))^(1/p)``, smooth on [0, 1] with value p^(-1/p) at 1."""
    s = np.asarray(s, dtype=float)
    one_minus = 1.0 - s
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = -np.expm1(p * np.log1p(-one_minus))
        out = (one_minus / denom) ** (1.0 / p)
    return np.where(one_minus > 0, out, p ** (-1.0 / p))


@lru_cache(maxsize=1024)
def pi_p(p: float) -> float:
    """``2 (p-1)^(1/p) * int_0^1 (1 - s^p)^(-1/p) ds`` by adaptive quadrature.

    The endpoint singularity at ``s = 1`` is handled with an algebraic
    weight ``(1 - s)^(-1/p)``; away from it the integrand is integrated
    directly.  Absolute error is kept below 1e-10.
    """
    p = _exponent(p)
    split = 1.0 - min(0.5, 8.0 / p)
    head, err_head = integrate.quad(
        lambda s: (-math.expm1(p * math.log(s))) ** (-1.0 / p) if s > 0 else 1.0,
        0.0,
        split,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    tail, err_tail = integrate.quad(
        lambda s: float(_ratio_root(s, p)),
        split,
        1.0,
        weight="alg",
        wvar=(0.0, -1.0 / p),
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    scale = 2.0 * (p - 1.0) ** (1.0 / p)
    if scale * (err_head + err_tail) > 1e-10:
        raise ArithmeticError(f"quadrature for pi_p did not reach 1e-10 at p={p}")
    return scale * (head + tail)


def sin_p(p: float, x) -> np.ndarray | float:
    """Generalised sine with half-period ``pi_p``.

    On ``[0, pi_p/2]`` it inverts ``y -> (p-1)^(1/p) int_0^y (1 - s^p)^(-1/p) ds``
    (written through the regularised incomplete beta function); it is then
    extended by ``sin_p(pi_p - x) = sin_p(x)``, oddness and ``2 pi_p``
    periodicity.  ``u(x) = sin_p(pi_p x)`` solves the first Dirichlet
    eigenproblem on (0, 1) with eigenvalue ``pi_p^p``.
    """
    p = _exponent(p)
    half = pi_p(p)
    xa = np.asarray(x, dtype=float)
    r = np.mod(xa, 2.0 * half)
    sign = np.where(r > half, -1.0, 1.0)
    r = np.where(r > half, r - half, r)
    r = np.minimum(r, half - r)
    frac = np.clip(2.0 * r / half, 0.0, 1.0)
    z = special.betaincinv(1.0 / p, 1.0 - 1.0 / p, frac)
    # y^p underflows for large p; there I_z(a, b) = z^a / (a B(a, b)) to
    # relative accuracy O(z), so y = z^a is linear in frac.
    linear = frac * special.beta(1.0 / p, 1.0 - 1.0 / p) / p
    y = np.where(z > 1e-280, np.abs(z) ** (1.0 / p), linear)
    out = sign * y
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LambdaKP:
    """``lambda_{k,p}`` in three forms; ``value`` is None when it overflows."""

    k: int
    p: float
    root: float
    log: float
    value: float | None

    @property
    def overflow(self) -> bool:
        return self.value is None


def _index(k) -> int:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValidationError(f"index k must be a positive integer, got {k!r}")
    return int(k)


def lambda_kp(k: int, p: float) -> LambdaKP:
    k, p = _index(k), _exponent(p)
    root = k * pi_p(p)
    log = p * math.log(root)
    value = math.exp(log) if log < 709.0 else None
    return LambdaKP(k, p, root, log, value)


# ---------------------------------------------------------------------------
# Curve families


@dataclass(frozen=True)
class CurveFamily1D:
    k: int
    branch: str
    p: float = math.inf

    def __post_init__(self):
        k = _index(self.k)
        object.__setattr__(self, "k", k)
        if self.branch not in BRANCHES:
            raise ValidationError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        if (self.branch == "even") != (k % 2 == 0):
            raise ValidationError(f"branch {self.branch!r} does not match the parity of k={k}")
        if self.p != math.inf:
            object.__setattr__(self, "p", _exponent(self.p))

    @property
    def finite(self) -> bool:
        return self.p != math.inf


@dataclass(frozen=True)
class FucikPair:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"{name} must be positive and finite, got {v}")
            object.__setattr__(self, name, v)

    def __iter__(self):
        return iter((self.alpha, self.beta))


def _slope(s: float) -> float:
    s = float(s)
    if not (s > 0 and math.isfinite(s)):
        raise ValidationError(f"s must be positive and finite, got {s}")
    return s


def _coefficients(k: int, branch: str) -> tuple[float, float]:
    """Weights ``(a, b)`` with ``alpha_root = scale * (a + b / s)``."""
    if branch == "even":
        return k / 2.0, k / 2.0
    lo, hi = (k - 1) / 2.0, (k + 1) / 2.0
    return (lo, hi) if branch == "odd_plus" else (hi, lo)


def curve_1d_finite(family: CurveFamily1D, s: float) -> FucikPair:
    """Point of a finite-``p`` curve as ``(alpha^(1/p), beta^(1/p))``.

    ``s`` is the ratio ``beta^(1/p) / alpha^(1/p)``; ``s = 1`` is the
    diagonal point ``(k pi_p, k pi_p)``.
    """
    if not family.finite:
        return curve_1d_infinity(family.k, family.branch, s)
    s = _slope(s)
    a, b = _coefficients(family.k, family.branch)
    root = pi_p(family.p) * (a + b / s)
    return FucikPair(root, s * root)


def curve_1d_infinity(k: int, branch: str, s: float) -> FucikPair:
    """Limit curve point; exact arithmetic in ``k`` and ``s``."""
    family = CurveFamily1D(k, branch)
    s = _slope(s)
    a, b = _coefficients(family.k, family.branch)
    alpha = 2.0 * a + 2.0 * b / s
    return FucikPair(alpha, 2.0 * a * s + 2.0 * b)


def defining_relation(family: CurveFamily1D, pair: FucikPair) -> float:
    """Residual of the linear relation in ``(alpha^(-1/p), beta^(-1/p))``.

    Every branch satisfies ``a / alpha_root + b / beta_root = 1 / pi_p``
    with the branch weights ``(a, b)``; ``pi_inf = 2``.
    """
    a, b = _coefficients(family.k, family.branch)
    scale = pi_p(family.p) if family.finite else 2.0
    return a / pair.alpha + b / pair.beta - 1.0 / scale


def family_rows(families: Iterable[CurveFamily1D], s_values: Sequence[float]) -> list[dict]:
    rows = []
    for fam in families:
        for s in s_values:
            pt = curve_1d_finite(fam, s)
            rows.append({"k": fam.k, "branch": fam.branch, "p": fam.p, "s": float(s), "alpha_root": pt.alpha, "beta_root": pt.beta})
    return rows


def families_for(k: int, p: float = math.inf) -> list[CurveFamily1D]:
    """All curve families of index ``k``: one for even ``k``, two for odd."""
    k = _index(k)
    if k % 2 == 0:
        return [CurveFamily1D(k, "even", p)]
    return [CurveFamily1D(k, "odd_plus", p), CurveFamily1D(k, "odd_minus", p)]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "inf" if v == math.inf else repr(float(v))
    return str(v)


def rows_to_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


FAMILY_COLUMNS = ("k", "branch", "p", "s", "alpha_root", "beta_root")


# ---------------------------------------------------------------------------
# p -> infinity


@dataclass
class ConvergenceReport:
    """Distances from finite-``p`` curve points to the limit point.

    ``monotone_tail`` refers to the entries with ``p >= 16`` (or all of them
    when none are that large).  ``extrapolated`` is the constant term of a
    least-squares fit ``d(p) ~ a + b ln(p)/p + c/p``; it should be near 0.
    """

    k: int
    branch: str
    s: float
    limit: FucikPair
    rows: list[dict]
    monotone_tail: bool
    extrapolated: float | None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "branch": self.branch,
            "s": self.s,
            "limit": {"alpha": self.limit.alpha, "beta": self.limit.beta},
            "rows": self.rows,
            "monotone_tail": self.monotone_tail,
            "extrapolated": self.extrapolated,
        }


def converge_check(k: int, branch: str, s: float, p_list: Sequence[float]) -> ConvergenceReport:
    ps = [_exponent(p) for p in p_list]
    if not ps or any(b <= a for a, b in zip(ps, ps[1:])):
        raise ValidationError("p_list must be non-empty and strictly increasing")
    limit = curve_1d_infinity(k, branch, s)
    rows = []
    for p in ps:
        pt = curve_1d_finite(CurveFamily1D(k, branch, p), s)
        d = math.hypot(pt.alpha - limit.alpha, pt.beta - limit.beta)
        rows.append({"p": p, "alpha_root": pt.alpha, "beta_root": pt.beta, "distance": d})
    tail = [r["distance"] for r in rows if r["p"] >= 16] or [r["distance"] for r in rows]
    monotone = all(b < a for a, b in zip(tail, tail[1:]))
    extrapolated = None
    if len(rows) >= 3:
        P = np.array(ps)
        A = np.column_stack([np.ones_like(P), np.log(P) / P, 1.0 / P])
        coef, *_ = np.linalg.lstsq(A, np.array([r["distance"] for r in rows]), rcond=None)
        extrapolated = float(coef[0])
    return ConvergenceReport(_index(k), branch, float(s), limit, rows, monotone, extrapolated)


# ---------------------------------------------------------------------------
# Two-bump profiles on (0, 1)


def _node(ell: float) -> float:
    ell = float(ell)
    if not 0 < ell < 1:
        raise ValidationError(f"ell must lie in (0, 1), got {ell}")
    return ell


def _unit_points(x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)) or not np.all(np.isfinite(xa)):
        raise ValidationError("profile points must lie in [0, 1]")
    return xa


def eigenfunction_infinity(ell: float, x):
    """Piecewise-linear limit profile with a positive bump on (0, ell)."""
    ell = _node(ell)
    xa = _unit_points(x)
    out = np.where(xa <= ell / 2, xa, np.where(xa <= (ell + 1) / 2, ell - xa, xa - 1.0))
    return float(out) if out.ndim == 0 else out


def limit_pair(ell: float) -> FucikPair:
    """Eigenvalue pair of :func:`eigenfunction_infinity`."""
    ell = _node(ell)
    return FucikPair(2.0 / ell, 2.0 / (1.0 - ell))


def eigenfunction_p(ell: float, p: float, x):
    """Finite-``p`` two-bump profile vanishing at ``ell``.

    The negative bump is scaled by ``(1 - ell) / ell`` so that the profile
    is C^1 across the node; the positive bump peaks at 1.
    """
    ell, p = _node(ell), _exponent(p)
    xa = _unit_points(x)
    half = pi_p(p)
    amp = (1.0 - ell) / ell
    pos = sin_p(p, half * np.minimum(xa, ell) / ell)
    neg = -amp * sin_p(p, half * np.maximum(xa - ell, 0.0) / (1.0 - ell))
    out = np.where(xa <= ell, pos, neg)
    return float(out) if out.ndim == 0 else out


def sup_normalized(u: np.ndarray) -> np.ndarray:
    m = float(np.max(np.abs(u)))
    return u / m if m > 0 else u


def profile_csv(x: np.ndarray, u: np.ndarray) -> str:
    return rows_to_csv([{"x": a, "u": b} for a, b in zip(np.asarray(x, float), np.asarray(u, float))], ("x", "u"))


# ---------------------------------------------------------------------------
# Limit equation residual


@dataclass
class GridFunction1D:
    """Samples ``u(i/n)``, ``i = 0..n``, with zero boundary values."""

    n: int
    values: np.ndarray
    kink_tol: float | None = None

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"grid size must be an integer >= 2, got {self.n!r}")
        self.n = int(self.n)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.n + 1,):
            raise ValidationError(f"expected {self.n + 1} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("grid values must be finite")
        if abs(v[0]) > 1e-12 or abs(v[-1]) > 1e-12:
            raise ValidationError("grid function must vanish at both endpoints")
        self.values = v
        if self.kink_tol is None:
            self.kink_tol = math.sqrt(self.h)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], n: int, kink_tol: float | None = None) -> "GridFunction1D":
        x = np.arange(n + 1) / n
        return cls(n, np.asarray(f(x), dtype=float), kink_tol)


@dataclass
class ViscosityReport:
    max_violation: float
    violating_points: list[tuple[float, str, float]] = field(default_factory=list)
    kinks: int = 0

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "kinks": self.kinks,
            "violating_points": [{"x": x, "region": r, "value": v} for x, r, v in self.violating_points],
        }


#: Curvature magnitude of the quadratic test functions used at kinks.
TEST_CURVATURE = 1e3
ZERO_LEVEL = 1e-14
REPORT_LEVEL = 1e-9


def _operator(region: str, q: np.ndarray, X: np.ndarray, u: float, pair: FucikPair) -> np.ndarray:
    lap = -(q**2) * X
    if region == "positive":
        return np.minimum(lap, np.abs(q) - pair.alpha * u)
    if region == "negative":
        return np.maximum(lap, -np.abs(q) + pair.beta * abs(u))
    return lap


def viscosity_residual(u: GridFunction1D, pair: FucikPair) -> ViscosityReport:
    """Discrete check of the limit equation at interior grid points.

    Where the one-sided slopes agree within ``u.kink_tol`` the equation is
    evaluated with centred differences and ``|F|`` is the violation.  At a
    kink, quadratic test functions ``u_i + q (x - x_i) +/- M (x - x_i)^2``
    with ``q`` on 9 points between the one-sided slopes are used: touching
    from above at a concave kink tests the subsolution inequality
    ``F <= 0``, touching from below at a convex kink the supersolution
    inequality ``F >= 0``.
    """
    if u.n < 16:
        raise ValidationError(f"grid too coarse for the residual check (n={u.n} < 16)")
    v, h = u.values, u.h
    slopes = np.diff(v) / h
    worst = 0.0
    bad: list[tuple[float, str, float]] = []
    kinks = 0
    X = np.array([2.0 * TEST_CURVATURE, -2.0 * TEST_CURVATURE])
    for i in range(1, u.n):
        sl, sr, ui = slopes[i - 1], slopes[i], v[i]
        region = "zero" if abs(ui) <= ZERO_LEVEL else ("positive" if ui > 0 else "negative")
        if abs(sr - sl) <= u.kink_tol:
            d1 = 0.5 * (sl + sr)
            d2 = (sr - sl) / h
            value = abs(float(_operator(region, np.array([d1]), np.array([d2]), ui, pair)[0]))
        else:
            kinks += 1
            q = np.repeat(np.linspace(sl, sr, 9), 2)
            F = _operator(region, q, np.tile(X, 9), ui, pair)
            value = float(np.max(F)) if sl > sr else float(np.max(-F))
            value = max(0.0, value)
        if value > REPORT_LEVEL:
            bad.append((float(i * h), region, value))
        worst = max(worst, value)
    return ViscosityReport(worst, bad, kinks)
