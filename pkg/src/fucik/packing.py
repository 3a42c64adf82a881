"""Inscribed-ball problems: the inradius and the weighted two-ball packing.

Two geometric optimisation problems drive the limit spectrum:

* the inradius, the largest clearance over the domain;
* for a weight ``t > 0``, the largest ``rho`` such that two disjoint balls
  of radii ``t * rho`` and ``rho`` fit inside the domain.  Written over the
  pair of centres this is

      rho*(t) = max_{c1, c2} min(clr(c1) / t, clr(c2), |c1 - c2| / (1 + t)).

The inradius is found by a batched quadtree branch and bound (the
"pole of inaccessibility" scheme), which carries a certificate because the
clearance is 1-Lipschitz.  The two-ball objective is non-concave and
piecewise smooth; it is maximised by a multistart direct search in the
4-dimensional space of centre pairs.  All starts advance in lockstep so
that each poll step is a single vectorised clearance evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.stats import qmc

from . import geometry
from .errors import BudgetExceeded, ValidationError
from .geometry import DomainSpec, Point2


@dataclass
class InradiusSolution:
    radius: float
    center: Point2
    iterations: int
    certified_gap: float


@dataclass
class TwoBallSolution:
    """Optimal weighted pair of disjoint inscribed balls.

    ``radii`` is ``(t * rho, rho)``; ``objective_terms`` holds
    ``(clr(c1) / t, clr(c2), |c1 - c2| / (1 + t))`` at the reported centres.
    ``certified_gap`` is a practical bound built from the final search mesh
    and a brute-force grid comparison, not a rigorous global certificate.
    """

    rho: float
    t: float
    centers: tuple[Point2, Point2]
    radii: tuple[float, float]
    objective_terms: tuple[float, float, float]
    certified_gap: float
    converged: bool = True
    evaluations: int = 0
    grid_lower_bound: float = 0.0

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "t": self.t,
            "centers": [list(c) for c in self.centers],
            "radii": list(self.radii),
            "objective_terms": list(self.objective_terms),
            "certified_gap": self.certified_gap,
            "converged": self.converged,
            "evaluations": self.evaluations,
            "grid_lower_bound": self.grid_lower_bound,
        }


def default_tol(domain: DomainSpec) -> float:
    return 1e-4 * geometry.diameter(domain)


def _check_tol(tol: float | None, domain: DomainSpec) -> float:
    if tol is None:
        return default_tol(domain)
    if not (tol > 0 and math.isfinite(tol)):
        raise ValidationError(f"tol must be positive, got {tol}")
    return float(tol)


def _check_t(t: float) -> float:
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise ValidationError(f"weight t must be positive and finite, got {t}")
    return t


# ---------------------------------------------------------------------------
# Inradius


def inradius(
    domain: DomainSpec,
    tol: float | None = None,
    *,
    max_cells: int = 4_000_000,
    polish: bool = True,
) -> InradiusSolution:
    """Largest ball inscribed in the domain.

    Cells of a quadtree over the bounding box are refined while their upper
    bound ``clr(centre) + half_diagonal`` exceeds the best value by more
    than ``tol``; on exit the true inradius is within ``certified_gap`` of
    the reported one.  A short direct-search polish then sharpens the
    reported value (it can only increase it, so the certificate still holds).
    """
    tol = _check_tol(tol, domain)
    if domain.is_interval:
        iv = domain.shapes[0]
        return InradiusSolution(iv.length / 2, Point2((iv.a + iv.b) / 2, 0.0), 0, 0.0)

    arr = geometry.arrangement(domain)
    x0, y0, x1, y1 = arr.bbox
    size = min(x1 - x0, y1 - y0)
    nx, ny = int(math.ceil((x1 - x0) / size)), int(math.ceil((y1 - y0) / size))
    half = size / 2
    gx, gy = np.meshgrid(x0 + half + size * np.arange(nx), y0 + half + size * np.arange(ny), indexing="ij")
    centers = np.column_stack([gx.ravel(), gy.ravel()])

    best_val, best_pt = -np.inf, None
    max_pruned_ub = -np.inf
    evaluated = 0
    rounds = 0
    while len(centers):
        rounds += 1
        vals = arr.signed_clearance(centers)
        evaluated += len(centers)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_pt = float(vals[k]), centers[k].copy()
        ub = vals + half * math.sqrt(2.0)
        live = ub > best_val + tol
        if (~live).any():
            max_pruned_ub = max(max_pruned_ub, float(ub[~live].max()))
        centers = centers[live]
        if evaluated > max_cells:
            best = InradiusSolution(best_val, Point2(*best_pt), rounds, float(ub[live].max() - best_val))
            raise BudgetExceeded(f"inradius search exceeded {max_cells} cell evaluations", best)
        half /= 2
        offs = np.array([[-half, -half], [-half, half], [half, -half], [half, half]])
        centers = (centers[:, None, :] + offs[None, :, :]).reshape(-1, 2)

    if best_pt is None or best_val <= 0:
        raise ValidationError("domain appears to be empty")
    if polish:
        x, val = _polish_point(arr, best_pt, best_val, start=max(tol, 1e-3 * size), stop=1e-10 * size)
        if val > best_val:
            best_val, best_pt = val, x
    gap = max(0.0, max_pruned_ub - best_val)
    return InradiusSolution(best_val, Point2(float(best_pt[0]), float(best_pt[1])), rounds, gap)


def _polish_point(arr, x, fx, start, stop, n_dirs=12):
    """Compass search on the clearance with rotating direction sets."""
    x = np.asarray(x, dtype=float)
    h = start
    angles0 = np.linspace(0, 2 * math.pi, n_dirs, endpoint=False)
    k = 0
    while h > stop:
        ang = angles0 + 0.5 * (k % 2) * (2 * math.pi / n_dirs)
        trial = x + h * np.column_stack([np.cos(ang), np.sin(ang)])
        vals = arr.signed_clearance(trial)
        j = int(np.argmax(vals))
        if vals[j] > fx:
            x, fx = trial[j], float(vals[j])
        else:
            h *= 0.5
        k += 1
    return x, fx


# ---------------------------------------------------------------------------
# Two-ball packing


def _pair_objective(arr, X: np.ndarray, t: float) -> np.ndarray:
    s = arr.signed_clearance(X.reshape(-1, 2)).reshape(-1, 2)
    d = np.hypot(X[:, 0] - X[:, 2], X[:, 1] - X[:, 3])
    return np.minimum(np.minimum(s[:, 0] / t, s[:, 1]), d / (1.0 + t))


def _pair_matrix(pts: np.ndarray, clr: np.ndarray, t: float) -> np.ndarray:
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    return np.minimum(np.minimum(clr[:, None] / t, clr[None, :]), d / (1.0 + t))


def grid_lower_bound(domain: DomainSpec, t: float, n: int = 32) -> tuple[float, np.ndarray]:
    """Best objective over all pairs of centres of an ``n x n`` grid of cells.

    Every grid pair is feasible, so the value is a lower bound on rho*(t).
    Returns the value and the pair as a length-4 array.
    """
    arr = geometry.arrangement(domain)
    x0, y0, x1, y1 = arr.bbox
    xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
    ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    clr = arr.signed_clearance(pts)
    inside = clr > 0
    pts, clr = pts[inside], clr[inside]
    if len(pts) < 2:
        return 0.0, np.zeros(4)
    best, pair = -np.inf, None
    for lo in range(0, len(pts), 512):
        blk = slice(lo, lo + 512)
        d = np.sqrt(((pts[blk, None, :] - pts[None, :, :]) ** 2).sum(-1))
        F = np.minimum(np.minimum(clr[blk, None] / t, clr[None, :]), d / (1.0 + t))
        i, j = divmod(int(np.argmax(F)), F.shape[1])
        if F[i, j] > best:
            best, pair = float(F[i, j]), np.concatenate([pts[lo + i], pts[j]])
    return best, pair


def _start_pool(arr, seed: int, n: int) -> np.ndarray:
    x0, y0, x1, y1 = arr.bbox
    sampler = qmc.Sobol(d=2, scramble=True, seed=seed)
    m = int(math.log2(n))
    pts = np.empty((0, 2))
    while True:
        raw = qmc.scale(sampler.random_base2(m), [x0, y0], [x1, y1])
        pts = np.vstack([pts, raw[arr.contains(raw)]])
        if len(pts) >= n // 2 or sampler.num_generated >= 2**16:
            return pts
        # each further draw doubles the total, keeping the sequence balanced
        m = int(math.log2(sampler.num_generated))


def _pick_starts(F: np.ndarray, pts: np.ndarray, count: int, sep: float) -> np.ndarray:
    """Starting pairs: half the best pool pairs, half spread out.

    Ranking alone lets one family of near-equivalent pairs (for instance both
    centres in the largest lobe) fill every slot, so the second half is chosen
    by farthest-point sampling among pairs reaching half the best value.
    """
    flat = F.ravel()
    n = F.shape[1]
    top = min(flat.size, 200 * count)
    order = np.argpartition(-flat, top - 1)[:top]
    order = order[np.lexsort((order, -flat[order]))]
    chosen: list[np.ndarray] = []
    for k in order:
        i, j = divmod(int(k), n)
        if i == j:
            continue
        cand = np.concatenate([pts[i], pts[j]])
        if all(np.linalg.norm(cand - c) > sep for c in chosen):
            chosen.append(cand)
            if len(chosen) == (count + 1) // 2:
                break

    good = np.flatnonzero(flat >= 0.5 * flat.max())
    good = good[good // n != good % n]
    if len(good) > 20000:
        good = good[np.linspace(0, len(good) - 1, 20000).astype(int)]
    cand = np.hstack([pts[good // n], pts[good % n]])
    gap = np.full(len(cand), np.inf)
    for c in chosen:
        gap = np.minimum(gap, np.linalg.norm(cand - c, axis=1))
    while len(chosen) < count and len(cand):
        k = int(np.argmax(gap))
        if gap[k] <= sep:
            break
        chosen.append(cand[k])
        gap = np.minimum(gap, np.linalg.norm(cand - cand[k], axis=1))
    return np.array(chosen)


def _survivors(X: np.ndarray, fx: np.ndarray, count: int, sep: float, band: float) -> list[int]:
    """Indices to refine: half by value, half spread over the near-best ones.

    On a plateau of near-equivalent pairs a slightly better configuration
    often has a lower value after the coarse phase, so ranking alone drops
    it.
    """
    order = np.lexsort((np.arange(len(fx)), -fx))
    keep: list[int] = []
    for k in order:
        if all(np.linalg.norm(X[k] - X[q]) > sep for q in keep):
            keep.append(int(k))
        if len(keep) == (count + 1) // 2:
            break
    pool = [int(k) for k in order if fx[k] >= fx[order[0]] - band and k not in keep]
    gap = {k: min(np.linalg.norm(X[k] - X[q]) for q in keep) for k in pool}
    while len(keep) < count and gap:
        k = max(gap, key=lambda q: (gap[q], -q))
        if gap[k] <= sep:
            break
        keep.append(k)
        del gap[k]
        for q in gap:
            gap[q] = min(gap[q], float(np.linalg.norm(X[q] - X[k])))
    return keep


def _directions(rng: np.random.Generator, n: int, extra: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    g = rng.standard_normal((extra, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([q.T, -q.T, g])


def _direct_search(f, X, fx, h, h_min, h_max, rng, max_iter, extra_dirs=8):
    """Lockstep direct search over many starts; maximises ``f``.

    Each start polls the same rotated direction set scaled by its own mesh
    size; a successful poll moves the start and doubles its mesh, a failed
    one halves it.  Random rotations make the polling directions dense in
    the limit, which is what lets the search cross the kinks of a max-min
    objective.
    """
    n = X.shape[1]
    evals = 0
    it = 0
    while it < max_iter:
        idx = np.flatnonzero(h >= h_min)
        if not len(idx):
            break
        D = _directions(rng, n, extra_dirs)
        trial = X[idx, None, :] + h[idx, None, None] * D[None, :, :]
        ft = f(trial.reshape(-1, n)).reshape(len(idx), len(D))
        evals += ft.size
        j = np.argmax(ft, axis=1)
        fb = ft[np.arange(len(idx)), j]
        win = fb > fx[idx]
        wi = idx[win]
        X[wi] = trial[win, j[win]]
        fx[wi] = fb[win]
        h[wi] = np.minimum(2.0 * h[wi], h_max)
        h[idx[~win]] *= 0.5
        it += 1
    return X, fx, h, it, evals


def _active_model(arr, x: np.ndarray, t: float, margin: float):
    """Smooth pieces of the objective that are within ``margin`` of active.

    Returns values and gradients (rows over the 4 centre coordinates) of
    ``dist_k(c1) / t``, ``dist_k(c2)`` and ``|c1 - c2| / (1 + t)``; the
    objective is the minimum of the values.
    """
    d1, g1 = arr.piece_distances(x[:2])
    d2, g2 = arr.piece_distances(x[2:])
    vals, rows = [], []
    for k in np.flatnonzero(d1 <= d1.min() + margin):
        vals.append(d1[k] / t)
        rows.append([g1[k, 0] / t, g1[k, 1] / t, 0.0, 0.0])
    for k in np.flatnonzero(d2 <= d2.min() + margin):
        vals.append(d2[k])
        rows.append([0.0, 0.0, g2[k, 0], g2[k, 1]])
    u = x[:2] - x[2:]
    L = math.hypot(*u)
    vals.append(L / (1.0 + t))
    e = u / L / (1.0 + t)
    rows.append([e[0], e[1], -e[0], -e[1]])
    return np.array(vals), np.array(rows)


def _model_step(vals: np.ndarray, G: np.ndarray, radius: float) -> tuple[np.ndarray, float]:
    """Maximise the linearised minimum over the box ``|step_i| <= radius``."""
    m = len(vals)
    A = np.hstack([-G, np.ones((m, 1))])
    bounds = [(-radius, radius)] * 4 + [(None, None)]
    res = linprog(np.r_[np.zeros(4), -1.0], A_ub=A, b_ub=vals, bounds=bounds, method="highs")
    if res.status != 0:
        return np.zeros(4), float(vals.min())
    return res.x[:4], float(res.x[4])


def _model_polish(arr, f, x, fx, t, margin, rounds=3):
    """Sequential quadratic polish of the max-min problem on near-active pieces.

    Direct search stalls where the active gradients are almost positively
    dependent (a thin ascent cone).  Here the pieces within ``margin`` of
    active are frozen and ``max s`` subject to each smooth term ``>= s`` is
    solved with SLSQP; the result is kept only if the true objective improves.
    A failed step is retried once with a wider set of frozen pieces.
    """
    evals = 0
    wide = False
    for _ in range(rounds + 1):
        m = 30.0 * margin if wide else margin
        d1, _ = arr.piece_distances(x[:2])
        d2, _ = arr.piece_distances(x[2:])
        k1 = np.flatnonzero(d1 <= d1.min() + m)
        k2 = np.flatnonzero(d2 <= d2.min() + m)

        memo: dict[bytes, tuple] = {}

        def pieces(z):
            key = z[:4].tobytes()
            if key not in memo:
                memo.clear()
                memo[key] = (*arr.piece_distances(z[:2]), *arr.piece_distances(z[2:4]))
            return memo[key]

        def cons(z):
            a, _, b, _ = pieces(z)
            sep = math.hypot(z[0] - z[2], z[1] - z[3]) / (1.0 + t)
            return np.r_[a[k1] / t, b[k2], sep] - z[4]

        def jac(z):
            _, ga, _, gb = pieces(z)
            n1, n2 = len(k1), len(k2)
            J = np.zeros((n1 + n2 + 1, 5))
            J[:n1, 0:2] = ga[k1] / t
            J[n1 : n1 + n2, 2:4] = gb[k2]
            u = z[:2] - z[2:4]
            e = u / max(math.hypot(*u), 1e-300) / (1.0 + t)
            J[-1, :4] = [e[0], e[1], -e[0], -e[1]]
            J[:, 4] = -1.0
            return J

        res = minimize(
            lambda z: -z[4],
            np.r_[x, fx],
            jac=lambda z: np.r_[0.0, 0.0, 0.0, 0.0, -1.0],
            constraints=[{"type": "ineq", "fun": cons, "jac": jac}],
            method="SLSQP",
            options={"maxiter": 100, "ftol": 1e-15},
        )
        xn = res.x[:4]
        fn = float(f(xn[None])[0])
        evals += res.nfev + 1
        if not fn > fx:
            # a piece just outside the frozen set took over; freeze more
            if wide:
                break
            wide = True
            continue
        gain = fn - fx
        x, fx = xn, fn
        if gain < 1e-14 * max(abs(fx), 1.0):
            break
    return x, fx, evals


def stationarity(domain: DomainSpec, sol: "TwoBallSolution", radius: float) -> float:
    """Improvement promised by the linearised objective within ``radius``.

    Near zero at a local maximiser; used as one term of the reported gap.
    """
    arr = geometry.arrangement(domain)
    x = np.array([*sol.centers[0], *sol.centers[1]])
    vals, G = _active_model(arr, x, sol.t, margin=3.0 * radius)
    _, model = _model_step(vals, G, radius)
    return max(0.0, model - float(vals.min()))


def _coordinate_polish(f, x, fx, h, h_min):
    n = len(x)
    E = np.vstack([np.eye(n), -np.eye(n)])
    evals = 0
    while h >= h_min:
        trial = x + h * E
        v = f(trial)
        evals += len(v)
        j = int(np.argmax(v))
        if v[j] > fx:
            x, fx = trial[j], float(v[j])
        else:
            h *= 0.5
    return x, fx, evals


def _two_ball_interval(domain: DomainSpec, t: float) -> TwoBallSolution:
    iv = domain.shapes[0]
    L = iv.length
    rho = L / (2.0 * (1.0 + t))
    r1, r2 = t * rho, rho
    c1, c2 = Point2(iv.a + r1, 0.0), Point2(iv.b - r2, 0.0)
    terms = (r1 / t, r2, (c2.x - c1.x) / (1.0 + t))
    return TwoBallSolution(rho, t, (c1, c2), (r1, r2), terms, 0.0, True, 0, rho)


def two_ball_rho(
    domain: DomainSpec,
    t: float,
    tol: float | None = None,
    *,
    starts: int = 128,
    seed: int = 0,
    pool: int = 512,
    refine: int = 8,
    max_iter: int = 4000,
    restarts: int = 3,
    extra_dirs: int = 8,
    polish: int = 8,
) -> TwoBallSolution:
    """Maximise ``min(clr(c1)/t, clr(c2), |c1-c2|/(1+t))`` over centre pairs.

    Deterministic for a fixed ``seed``.  If the iteration budget runs out
    before the mesh reaches its floor the best pair so far is returned with
    ``converged=False``.
    """
    t = _check_t(t)
    tol = _check_tol(tol, domain)
    if domain.is_interval:
        return _two_ball_interval(domain, t)

    arr = geometry.arrangement(domain)
    diam = geometry.diameter(domain)
    f = lambda X: _pair_objective(arr, X, t)  # noqa: E731

    pts = _start_pool(arr, seed, pool)
    if len(pts) < 2:
        raise ValidationError("could not place sample points inside the domain")
    clr = arr.signed_clearance(pts)
    F = _pair_matrix(pts, clr, t)
    X = _pick_starts(F, pts, starts, sep=0.02 * diam)
    fx = f(X)
    rng = np.random.default_rng(seed)

    h = np.full(len(X), 0.02 * diam)
    X, fx, h, it1, ev1 = _direct_search(f, X, fx, h, 1e-3 * diam, 0.1 * diam, rng, max_iter // 2)

    keep = _survivors(X, fx, refine, sep=1e-3 * diam, band=0.01 * diam)
    X, fx, h = X[keep].copy(), fx[keep].copy(), np.maximum(h[keep], 1e-3 * diam)
    h_floor = 1e-9 * diam
    X, fx, h, it2, ev2 = _direct_search(f, X, fx, h, h_floor, 0.1 * diam, rng, max_iter - it1, extra_dirs)
    # Restart from the converged points: a collapsed mesh at a kink is often
    # a stall rather than a local optimum.
    for _ in range(restarts):
        before = fx.copy()
        h = np.full(len(X), 1e-4 * diam)
        X, fx, h, it, ev = _direct_search(f, X, fx, h, h_floor, 0.1 * diam, rng, max_iter - it1 - it2, extra_dirs)
        it2 += it
        ev2 += ev
        if np.all(fx - before <= 1e-12 * diam):
            break
    converged = bool(np.all(h < h_floor))

    best = float(fx.max())
    polished = []
    evals = ev1 + ev2
    for k in np.lexsort((np.arange(len(fx)), -fx))[:polish]:
        if fx[k] >= best - 0.01 * diam:
            x, v = X[k], float(fx[k])
            if v > 0:
                x, v, e = _model_polish(arr, f, x, v, t, 1e-3 * diam)
                evals += e
            x, v, e = _coordinate_polish(f, x, v, 1e-8 * diam, 1e-11 * diam)
            evals += e
            polished.append((x, v))
    best = max(v for _, v in polished)
    if best <= 0:
        raise ValidationError("domain cannot host two disjoint balls")

    # Ties between symmetric optima: report the lexicographically smallest pair.
    tie = 1e-9 * diam
    cands = []
    for x, v in polished:
        if v >= best - tie:
            if t == 1.0 and tuple(x[2:]) < tuple(x[:2]):
                x = np.concatenate([x[2:], x[:2]])
            cands.append(tuple(float(c) for c in x))
    c = min(cands)
    xbest = np.array(c)
    rho = float(f(xbest[None])[0])

    s1, s2 = (float(v) for v in arr.distance(xbest.reshape(2, 2)))
    dist = math.hypot(xbest[0] - xbest[2], xbest[1] - xbest[3])
    lip = max(1.0 / t, 1.0, math.sqrt(2.0) / (1.0 + t))
    lb, _ = grid_lower_bound(domain, t)
    sol = TwoBallSolution(
        rho=rho,
        t=t,
        centers=(Point2(c[0], c[1]), Point2(c[2], c[3])),
        radii=(t * rho, rho),
        objective_terms=(s1 / t, s2, dist / (1.0 + t)),
        certified_gap=0.0,
        converged=converged,
        evaluations=int(evals),
        grid_lower_bound=lb,
    )
    mesh = float(h.max()) if not converged else h_floor
    sol.certified_gap = lip * mesh + max(0.0, lb - rho) + stationarity(domain, sol, tol)
    return sol


def max_twin_radius(domain: DomainSpec, tol: float | None = None, **kw) -> float:
    """Largest r such that two disjoint balls of radius r fit in the domain."""
    return two_ball_rho(domain, 1.0, tol, **kw).rho
