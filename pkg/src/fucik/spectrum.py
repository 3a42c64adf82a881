"""The first nontrivial curve of the limit spectrum and domain classification.

For a weight ``t > 0`` let ``c(t) = 1 / rho*(t)`` where ``rho*`` is the
weighted two-ball value from :mod:`fucik.packing`.  The curve is

    t  ->  (alpha, beta) = (c(t) / t, c(t)),

and the trivial lines are ``alpha = 1/r`` and ``beta = 1/r`` with ``r`` the
inradius.  Closed forms for the ball, the unit square and two linked balls
are provided as oracles.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import geometry, packing
from .errors import FucikError, ValidationError
from .geometry import DomainSpec
from .packing import TwoBallSolution

SQRT2 = math.sqrt(2.0)
#: Weight at which the square's curve leaves the horizontal trivial line.
SQUARE_T_STAR = 3.0 - 2.0 * SQRT2
#: The square's intersection with the trivial lines sits at (TAU0, 2).
TAU0 = 6.0 + 4.0 * SQRT2

CSV_COLUMNS = ("t", "alpha", "beta", "source", "c1x", "c1y", "r1", "c2x", "c2y", "r2")


def c_infinity(domain: DomainSpec, t: float, tol: float | None = None, **kw) -> float:
    return 1.0 / packing.two_ball_rho(domain, t, tol, **kw).rho


def trivial_lines(domain: DomainSpec, tol: float | None = None) -> float:
    """Level of both trivial lines, ``1 / inradius``."""
    return 1.0 / packing.inradius(domain, tol).radius


# ---------------------------------------------------------------------------
# Closed forms


class OraclePoint(tuple):
    """An ``(alpha, beta)`` pair that also records which formula produced it."""

    branch: str

    def __new__(cls, alpha: float, beta: float, branch: str):
        obj = super().__new__(cls, (float(alpha), float(beta)))
        obj.branch = branch
        return obj

    @property
    def alpha(self) -> float:
        return self[0]

    @property
    def beta(self) -> float:
        return self[1]


def _weight(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise ValidationError(f"t must be positive and finite, got {t}")
    return t


def oracle_ball(R: float, t: float) -> OraclePoint:
    t = _weight(t)
    if not R > 0:
        raise ValidationError("ball radius must be positive")
    c = (1.0 + t) / R
    return OraclePoint(c / t, c, "ball")


def oracle_square(t: float) -> OraclePoint:
    """Curve point of the unit square."""
    t = _weight(t)
    if t <= SQUARE_T_STAR:
        c, branch = 2.0, "trivial_low"
    elif t >= 1.0 / SQUARE_T_STAR:
        c, branch = 2.0 * t, "trivial_high"
    else:
        c, branch = (1.0 + t) * (1.0 + SQRT2 / 2.0), "diagonal"
    return OraclePoint(c / t, c, branch)


def oracle_linked(R1: float, R2: float, t: float) -> OraclePoint:
    """Curve point of two balls of radii ``R1 <= R2`` joined by a thin tube.

    The tube is treated as negligible: each ball of the pair sits in one
    lobe, or both share the larger lobe, whichever gives the larger value.
    """
    t = _weight(t)
    if not (0 < R1 <= R2):
        raise ValidationError("linked balls need 0 < R1 <= R2")
    small_first = min(R2, R1 / t)  # ball of radius t*rho in the R1 lobe
    big_first = min(R1, R2 / t)  # ball of radius t*rho in the R2 lobe
    shared = R2 / (1.0 + t)
    rho = max(small_first, big_first, shared)
    if shared > max(small_first, big_first):
        branch = "shared_ball"
    elif small_first >= big_first:
        branch = "trivial_low" if R2 <= R1 / t else "rising"
    else:
        branch = "flat" if R1 <= R2 / t else "trivial_high"
    c = 1.0 / rho
    return OraclePoint(c / t, c, branch)


# ---------------------------------------------------------------------------
# Curves


@dataclass
class SpectrumSample:
    t: float
    alpha: float
    beta: float
    source: str = "optimizer"
    witness: TwoBallSolution | None = None
    ok: bool = True
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"t": self.t, "alpha": self.alpha, "beta": self.beta, "source": self.source, "ok": self.ok}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class SpectrumCurve:
    """Samples of the curve, ordered by increasing ``t``.

    ``symmetry_defect`` compares the point at ``1/t`` with the mirror of the
    point at ``t``; it is only defined when the sample grid is symmetric
    under ``t -> 1/t``.
    """

    samples: list[SpectrumSample]
    trivial_level: float | None = None
    symmetry_defect: float | None = None

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def alpha(self) -> np.ndarray:
        return np.array([s.alpha for s in self.samples])

    @property
    def beta(self) -> np.ndarray:
        return np.array([s.beta for s in self.samples])

    @property
    def ok_fraction(self) -> float:
        return sum(s.ok for s in self.samples) / len(self.samples) if self.samples else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in self.samples:
            row = [s.t, s.alpha, s.beta, s.source]
            if s.witness is not None:
                (c1, c2), (r1, r2) = s.witness.centers, s.witness.radii
                row += [c1.x, c1.y, r1, c2.x, c2.y, r2]
            else:
                row += [""] * 6
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "trivial_level": self.trivial_level,
            "symmetry_defect": self.symmetry_defect,
            "ok_fraction": self.ok_fraction,
            "samples": [s.to_dict() for s in self.samples],
        }


def log_grid(t_min: float, t_max: float, n: int) -> np.ndarray:
    if not (0 < t_min < t_max and math.isfinite(t_max)):
        raise ValidationError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    if n < 2:
        raise ValidationError("need at least two samples")
    ts = np.exp2(np.linspace(math.log2(t_min), math.log2(t_max), n))
    ts[0], ts[-1] = t_min, t_max
    return ts


def _symmetry_defect(samples: list[SpectrumSample]) -> float | None:
    ts = [s.t for s in samples]
    n = len(ts)
    if any(abs(ts[i] * ts[n - 1 - i] - 1.0) > 1e-9 for i in range(n)):
        return None
    worst = 0.0
    for i in range(n):
        a, b = samples[i], samples[n - 1 - i]
        if a.ok and b.ok:
            worst = max(worst, abs(a.alpha - b.beta), abs(a.beta - b.alpha))
    return worst


def _sample(domain: DomainSpec, t: float, tol: float | None, kw: dict) -> SpectrumSample:
    try:
        sol = packing.two_ball_rho(domain, t, tol, **kw)
    except FucikError as exc:
        return SpectrumSample(float(t), math.nan, math.nan, ok=False, error=str(exc))
    c = 1.0 / sol.rho
    return SpectrumSample(float(t), c / t, c, witness=sol, ok=sol.converged, error=None if sol.converged else "not converged")


def curve_C2(
    domain: DomainSpec,
    t_min: float = 2.0**-6,
    t_max: float = 2.0**6,
    n_samples: int = 65,
    tol: float | None = None,
    *,
    seed: int = 0,
    threads: int | None = None,
    **kw,
) -> SpectrumCurve:
    """Sample the curve at log-spaced weights.

    Samples run concurrently; a failed sample is flagged (``ok=False``) and
    the rest of the curve is still returned.
    """
    ts = log_grid(t_min, t_max, n_samples)
    kw = dict(kw, seed=seed)
    workers = threads or min(8, os.cpu_count() or 1)
    if workers <= 1:
        samples = [_sample(domain, t, tol, kw) for t in ts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda t: _sample(domain, t, tol, kw), ts))
    level = trivial_lines(domain)
    return SpectrumCurve(samples, level, _symmetry_defect(samples))


def curve_from_oracle(oracle: Callable[[float], tuple[float, float]], ts: Iterable[float]) -> SpectrumCurve:
    samples = [SpectrumSample(float(t), *map(float, oracle(t)), source="oracle") for t in ts]
    return SpectrumCurve(samples, None, _symmetry_defect(samples))


# ---------------------------------------------------------------------------
# Classification


@dataclass
class SpectrumClassification:
    """Where the curve sits relative to the trivial lines.

    ``intersections`` lists the points where the curve meets them (both
    mirror images).  Eigenvalues there are double.  For ``TypeIIB`` the
    whole curve lies on the trivial lines and the corner point is listed.
    ``t_star`` is the weight below 1 at which the curve leaves the line
    ``beta = 1/r``, with ``bracket`` the width of the final bisection bracket.
    """

    kind: str
    inradius: float
    twin_radius: float
    trivial_level: float
    lambda2: float
    intersections: list[tuple[float, float]] = field(default_factory=list)
    t_star: float | None = None
    bracket: float | None = None
    ball_defect: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inradius": self.inradius,
            "twin_radius": self.twin_radius,
            "trivial_level": self.trivial_level,
            "lambda2": self.lambda2,
            "intersections": [{"alpha": a, "beta": b, "multiplicity": 2} for a, b in self.intersections],
            "t_star": self.t_star,
            "bracket": self.bracket,
            "ball_defect": self.ball_defect,
        }


def _ball_defect(domain: DomainSpec, center, radius: float, n: int = 4096) -> float:
    """Largest distance from a boundary sample to the inscribed ball."""
    pts = geometry.arrangement(domain).boundary_samples(n)
    d = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
    return float(np.abs(d - radius).max())


def find_branch_point(
    domain: DomainSpec,
    r: float,
    *,
    delta: float,
    rel_width: float = 1e-7,
    t_max: float = 2.0**40,
    **kw,
) -> tuple[float, float] | None:
    """Smallest weight ``T >= 1`` with ``T * rho*(T) >= r - delta``, by bisection.

    ``T * rho*(T)`` is the radius of the larger ball, so it reaches the
    inradius exactly where ``alpha = c(T) / T`` meets the trivial level.
    Returns ``(T, bracket_width)`` or None if no such weight is found.
    """

    def reached(T: float) -> bool:
        return T * packing.two_ball_rho(domain, T, **kw).rho >= r - delta

    lo, hi = 1.0, 2.0
    while not reached(hi):
        lo, hi = hi, 2.0 * hi
        if hi > t_max:
            return None
    while hi - lo > rel_width * hi:
        mid = math.sqrt(lo * hi)
        if reached(mid):
            hi = mid
        else:
            lo = mid
    return hi, hi - lo


def classify(
    domain: DomainSpec,
    tol: float | None = None,
    *,
    delta: float | None = None,
    seed: int = 0,
) -> SpectrumClassification:
    """Type I (a ball), II.A (curve crosses the trivial lines) or II.B (contained in them).

    ``tol`` (default ``1e-3 * diameter``) decides both "is a ball" and
    "twin radius equals inradius".  ``delta`` is the slack used when
    bisecting for the crossing (default ``1e-6 * diameter``).
    """
    diam = geometry.diameter(domain)
    tol = 1e-3 * diam if tol is None else float(tol)
    if not (tol > 0 and math.isfinite(tol)):
        raise ValidationError(f"tol must be positive, got {tol}")
    delta = 1e-6 * diam if delta is None else float(delta)

    ins = packing.inradius(domain)
    r = ins.radius
    R = packing.max_twin_radius(domain, seed=seed)
    level = 1.0 / r
    base = dict(inradius=r, twin_radius=R, trivial_level=level, lambda2=1.0 / R)

    if domain.is_interval:
        return SpectrumClassification("TypeI", ball_defect=0.0, **base)
    defect = _ball_defect(domain, ins.center, r)
    if defect <= tol:
        return SpectrumClassification("TypeI", ball_defect=defect, **base)
    if abs(R - r) <= tol:
        return SpectrumClassification(
            "TypeIIB", intersections=[(level, level)], t_star=1.0, bracket=0.0, ball_defect=defect, **base
        )

    found = find_branch_point(domain, r, delta=delta, seed=seed)
    if found is None:
        return SpectrumClassification("TypeIIA", ball_defect=defect, **base)
    T, width = found
    c = 1.0 / packing.two_ball_rho(domain, T, seed=seed).rho
    return SpectrumClassification(
        "TypeIIA",
        intersections=[(c, level), (level, c)],
        t_star=1.0 / T,
        bracket=width / T**2,
        ball_defect=defect,
        **base,
    )
