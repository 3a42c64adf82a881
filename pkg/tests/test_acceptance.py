"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected in the terminal summary.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracles
from domains import ANNULUS, BALL, LINKED, LINKED_EQUAL, SQUARE, STADIUM, linked_variants
from fucik import geometry as g
from fucik import one_dim as od
from fucik import packing as pk
from fucik import spectrum as sp

SQ2 = math.sqrt(2)


def test_criterion_1_ball(acceptance):
    start = time.perf_counter()
    ts = np.exp2(np.linspace(-4, 4, 17))
    errs = [abs(sp.c_infinity(BALL, t) - (1 + t)) / (1 + t) for t in ts]
    elapsed = time.perf_counter() - start
    ok = max(errs) <= 1e-3 and elapsed <= 30
    acceptance(1, "ball oracle", ok, f"max rel err {max(errs):.2e}, {elapsed:.1f}s")
    assert max(errs) <= 1e-3
    assert elapsed <= 30


def test_criterion_2_square(acceptance):
    start = time.perf_counter()
    c1 = sp.c_infinity(SQUARE, 1.0)
    low = {t: sp.c_infinity(SQUARE, t) for t in (0.05, 0.1, 0.15)}
    result = sp.classify(SQUARE)
    elapsed = time.perf_counter() - start
    t_err = abs(result.t_star - (3 - 2 * SQ2))
    tau0 = 2 * (SQ2 + 1) / (SQ2 - 1)
    hits = [p for p in result.intersections if abs(p[1] - 2) < 2e-2]
    point_err = min(max(abs(a - tau0), abs(b - 2)) for a, b in hits) if hits else math.inf
    checks = [
        abs(c1 - (2 + SQ2)) <= 1e-3,
        all(abs(v - 2) <= 1e-3 for v in low.values()),
        t_err <= 5e-3,
        point_err <= 2e-2,
        elapsed <= 60,
    ]
    detail = f"c(1)={c1:.6f}, t*={result.t_star:.6f} (err {t_err:.1e}), point err {point_err:.1e}, {elapsed:.1f}s"
    acceptance(2, "unit square", all(checks), detail)
    assert c1 == pytest.approx(2 + SQ2, abs=1e-3)
    for v in low.values():
        assert v == pytest.approx(2, abs=1e-3)
    assert t_err <= 5e-3
    assert point_err <= 2e-2
    assert elapsed <= 60


def test_criterion_3_linked_balls(acceptance):
    ts = [1.0, 1.25, 1.5, 1.75, 2.0]
    curves = {
        name: [pk.two_ball_rho(dom, t) for t in ts] for name, dom in linked_variants().items()
    }
    betas = [1 / sol.rho for sol in curves["balls"]]
    level = sp.trivial_lines(LINKED)
    spread = max(
        abs(1 / a.rho - 1 / b.rho)
        for name in ("square_lobe", "stadium_lobe")
        for a, b in zip(curves["balls"], curves[name])
    )
    beta_errs = [abs(b - 1.0) for b in betas]
    checks = [max(beta_errs) <= 2e-3, abs(level - 0.5) <= 1e-3, spread <= 2e-3]
    shown = ", ".join(f"{t}:{b:.5f}" for t, b in zip(ts, betas))
    detail = f"beta {{{shown}}}, level {level:.6f}, variant spread {spread:.1e}"
    acceptance(3, "linked balls", all(checks), detail)
    assert level == pytest.approx(0.5, abs=1e-3)
    assert spread <= 2e-3
    for t, b in zip(ts, betas):
        assert b == pytest.approx(1.0, abs=2e-3), f"beta at t={t}"


def test_criterion_4_classification(acceptance):
    expected = {
        "ball": (BALL, "TypeI"),
        "square": (SQUARE, "TypeIIA"),
        "linked": (LINKED, "TypeIIA"),
        "linked_equal": (LINKED_EQUAL, "TypeIIB"),
        "annulus": (ANNULUS, "TypeIIB"),
        "stadium": (STADIUM, "TypeIIB"),
    }
    got = {name: sp.classify(dom) for name, (dom, _) in expected.items()}
    kinds_ok = all(got[name].kind == kind for name, (_, kind) in expected.items())
    iib_gap = max(abs(r.inradius - r.twin_radius) for r in got.values() if r.kind == "TypeIIB")
    ok = kinds_ok and iib_gap <= 1e-3
    detail = ", ".join(f"{name}={r.kind}" for name, r in got.items()) + f"; IIB gap {iib_gap:.1e}"
    acceptance(4, "classification", ok, detail)
    for name, (_, kind) in expected.items():
        assert got[name].kind == kind, name
    assert iib_gap <= 1e-3


def test_criterion_5_exact_1d_curves(acceptance):
    worst_relation, worst_diag, exact = 0.0, 0.0, True
    for k in range(1, 7):
        for p in (1.5, 2.0, 4.0, 32.0, 500.0, math.inf):
            scale = 2.0 if p == math.inf else od.pi_p(p)
            for fam in od.families_for(k, p):
                for s in (0.05, 0.3, 1.0, 2.5, 40.0):
                    worst_relation = max(worst_relation, abs(od.defining_relation(fam, od.curve_1d_finite(fam, s))))
                diag = od.curve_1d_finite(fam, 1.0)
                worst_diag = max(worst_diag, abs(diag.alpha - k * scale), abs(diag.beta - k * scale))
    # limit formulas, compared with exact rational arithmetic
    for k in range(1, 7):
        for s in (0.25, 0.5, 1.0, 2.0, 4.0):
            for fam in od.families_for(k):
                pt = od.curve_1d_infinity(k, fam.branch, s)
                if k % 2 == 0:
                    want = (k + k / s, k * s + k)
                elif fam.branch == "odd_plus":
                    want = ((k - 1) + (k + 1) / s, (k - 1) * s + (k + 1))
                else:
                    want = ((k + 1) + (k - 1) / s, (k + 1) * s + (k - 1))
                exact &= (pt.alpha, pt.beta) == want
    ok = exact and worst_relation <= 1e-10 and worst_diag <= 1e-12
    acceptance(5, "1D exact curves", ok, f"relation {worst_relation:.1e}, diagonal {worst_diag:.1e}, limit exact={exact}")
    assert exact
    assert worst_relation <= 1e-10
    assert worst_diag <= 1e-12


def test_criterion_6_convergence_trend(acceptance):
    ps = [4 * 2**i for i in range(9)]
    gaps = [abs(od.pi_p(p) - 2) for p in ps]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    far = abs(od.pi_p(1e4) - 2)
    identity = max(
        abs(abs(od.lambda_kp(k, p).root - 2 * k) - k * abs(od.pi_p(p) - 2)) for k in range(1, 5) for p in ps + [1e4]
    )
    ok = decreasing and far <= 5e-3 and identity <= 1e-12
    acceptance(6, "convergence trend", ok, f"|pi_p-2| at 1e4 = {far:.2e}, identity err {identity:.1e}")
    assert decreasing
    assert far <= 5e-3
    assert identity <= 1e-12


def test_criterion_7_viscosity_checker(acceptance):
    worst_exact, weakest_detect, regions_ok = 0.0, math.inf, True
    for ell in np.round(np.arange(0.1, 1.0, 0.1), 10):
        u = od.GridFunction1D.from_function(lambda x: od.eigenfunction_infinity(ell, x), 1000)
        a, b = od.limit_pair(ell)
        worst_exact = max(worst_exact, od.viscosity_residual(u, od.FucikPair(a, b)).max_violation)
        for factor in (0.8, 1.2):
            rep = od.viscosity_residual(u, od.FucikPair(factor * a, b))
            weakest_detect = min(weakest_detect, rep.max_violation)
            big = [r for _, r, v in rep.violating_points if v >= 0.05]
            regions_ok &= bool(big) and set(big) == {"positive"}
    ok = worst_exact <= 1e-6 and weakest_detect >= 0.05 and regions_ok
    acceptance(7, "viscosity checker", ok, f"exact {worst_exact:.1e}, weakest detection {weakest_detect:.3f}, regions ok={regions_ok}")
    assert worst_exact <= 1e-6
    assert weakest_detect >= 0.05
    assert regions_ok


# -- criterion 8: property suites ---------------------------------------------

shapes = st.one_of(
    st.builds(lambda x, y, r: g.Ball((x, y), r), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.3, 1.5)),
    st.builds(
        lambda x, y, w, h: g.Rectangle((x, y), (x + w, y + h)),
        st.floats(-1, 1),
        st.floats(-1, 1),
        st.floats(0.4, 2.5),
        st.floats(0.4, 2.5),
    ),
    st.builds(
        lambda x, y, dx, dy, w: g.Stadium((x, y), (x + dx, y + dy), w),
        st.floats(-1, 1),
        st.floats(-1, 1),
        st.floats(0.5, 2),
        st.floats(-1, 1),
        st.floats(0.2, 0.8),
    ),
)
unions = st.lists(shapes, min_size=1, max_size=3, unique=True).map(lambda s: g.DomainSpec(tuple(s)))
linked = st.builds(
    lambda r1, extra, gap_frac: g.linked_balls(r1, r1 + extra, gap_frac * r1),
    st.floats(0.5, 1.5),
    st.floats(0.0, 1.5),
    st.floats(0.1, 0.9),
)
domains = st.one_of(unions, linked)
weights = st.floats(-3, 3).map(lambda e: float(2.0**e))

PROPERTY_CASES = 50
PROPERTY_STATE: dict[str, tuple[bool, int, float]] = {}
prop_settings = settings(max_examples=PROPERTY_CASES, suppress_health_check=[HealthCheck.too_slow])


def _run_property(name, prop):
    counter = {"n": 0}
    start = time.perf_counter()
    ok = False
    try:
        prop(counter)
        ok = True
    finally:
        PROPERTY_STATE[name] = (ok, counter["n"], time.perf_counter() - start)


def test_property_symmetry():
    @prop_settings
    @given(domains, weights)
    def prop(counter, dom, t):
        counter["n"] += 1
        tol = pk.default_tol(dom)
        a = pk.two_ball_rho(dom, 1 / t).rho
        b = pk.two_ball_rho(dom, t).rho
        assert abs(a - t * b) <= 2 * tol * max(1.0, t)

    _run_property("symmetry", prop)


def test_property_scaling():
    @prop_settings
    @given(domains, weights, st.sampled_from([0.5, 2.0]))
    def prop(counter, dom, t, s):
        counter["n"] += 1
        tol = pk.default_tol(dom)
        base = pk.two_ball_rho(dom, t).rho
        scaled = pk.two_ball_rho(dom.scaled(s), t).rho
        assert abs(scaled - s * base) <= 2 * s * tol

    _run_property("scaling", prop)


def test_property_band_containment():
    @prop_settings
    @given(domains, weights)
    def prop(counter, dom, t):
        counter["n"] += 1
        tol = pk.default_tol(dom)
        rho = pk.two_ball_rho(dom, t).rho
        inr = pk.inradius(dom).radius
        twin = pk.max_twin_radius(dom)
        # both coordinates of (c/t, c) lie beyond the trivial level ...
        assert rho <= inr + tol and t * rho <= inr + tol
        # ... and the smaller one does not exceed lambda_2
        assert max(rho, t * rho) >= twin - tol

    _run_property("band", prop)


def test_property_brute_force():
    @prop_settings
    @given(domains, weights)
    def prop(counter, dom, t):
        counter["n"] += 1
        tol = pk.default_tol(dom)
        assert oracles.brute_force_rho(dom, t, n=64) <= pk.two_ball_rho(dom, t).rho + tol

    _run_property("brute_force", prop)


def test_criterion_8_property_suites(acceptance):
    names = ("symmetry", "scaling", "band", "brute_force")
    missing = [n for n in names if n not in PROPERTY_STATE]
    if missing:
        pytest.skip(f"property tests not run: {missing}")
    cases = sum(PROPERTY_STATE[n][1] for n in names)
    elapsed = sum(PROPERTY_STATE[n][2] for n in names)
    passed = all(PROPERTY_STATE[n][0] for n in names)
    ok = passed and cases >= 200 and elapsed <= 300
    parts = ", ".join(f"{n} {'ok' if PROPERTY_STATE[n][0] else 'FAILED'}" for n in names)
    acceptance(8, "property suites", ok, f"{parts}; {cases} cases in {elapsed:.0f}s")
    assert passed
    assert cases >= 200
    assert elapsed <= 300
