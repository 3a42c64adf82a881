import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from domains import ANNULUS, BALL, LINKED, SQUARE, STADIUM
from fucik import geometry as g
from fucik.errors import DomainError, ValidationError


def test_contains_examples():
    assert g.contains(BALL, (0, 0))
    assert not g.contains(BALL, (2, 0))
    assert g.contains(SQUARE, (0.5, 0.5))


def test_boundary_points_are_outside():
    assert not g.contains(SQUARE, (0.0, 0.5))
    assert not g.contains(BALL, (1.0, 0.0))
    with pytest.raises(DomainError):
        g.clearance(SQUARE, (1.0, 0.3))


def test_clearance_examples():
    assert g.clearance(BALL, (0, 0)) == pytest.approx(1.0, abs=1e-15)
    assert g.clearance(SQUARE, (0.5, 0.5)) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        g.clearance(BALL, (2, 0))


def test_union_clearance_exceeds_per_shape_minimum():
    dom = g.DomainSpec((g.Ball((0, 0), 1), g.Ball((0.5, 0), 1)))
    value = g.clearance(dom, (0.25, 0))
    assert value > 0.75
    # Boundary of the union: the two outer arcs, which meet at x = 0.25.
    y = math.sqrt(1 - 0.25**2)
    assert value == pytest.approx(y, abs=1e-12)
    assert value == pytest.approx(oracles.clearance(dom, [(0.25, 0)])[0], abs=1e-5)


def test_bounding_box_examples():
    assert g.bounding_box(BALL) == ((-1, -1), (1, 1))
    assert g.bounding_box(g.rectangle((0, 0), (1, 2))) == ((0, 0), (1, 2))
    dom = g.DomainSpec((g.Ball((0, 0), 1), g.Ball((3, 0), 1)))
    assert g.bounding_box(dom) == ((-1, -1), (4, 1))


@pytest.mark.parametrize("dom", [BALL, SQUARE, LINKED, ANNULUS, STADIUM], ids=["ball", "square", "linked", "annulus", "stadium"])
def test_clearance_matches_reference(dom):
    rng = np.random.default_rng(1)
    (x0, y0), (x1, y1) = g.bounding_box(dom)
    pts = rng.uniform((x0, y0), (x1, y1), size=(3000, 2))
    ours = g.arrangement(dom).signed_clearance(pts)
    ref = oracles.clearance(dom, pts)
    inside = ref > 1e-4
    assert inside.sum() > 500
    np.testing.assert_allclose(ours[inside], ref[inside], atol=1e-5)
    assert np.all(ours[ref < -1e-4] < 0)


def test_polygon_union_reference():
    poly = g.Polygon(((0, 0), (2, 0), (2, 1), (1, 2), (0, 1)))
    dom = g.DomainSpec((poly, g.Ball((2, 0.5), 0.75)))
    rng = np.random.default_rng(2)
    pts = rng.uniform((-0.5, -0.5), (3, 2.5), size=(3000, 2))
    ours = g.arrangement(dom).signed_clearance(pts)
    ref = oracles.clearance(dom, pts)
    inside = ref > 1e-4
    np.testing.assert_allclose(ours[inside], ref[inside], atol=1e-5)


def test_clockwise_polygon_is_normalised():
    cw = g.Polygon(((0, 0), (0, 1), (1, 1), (1, 0)))
    dom = g.DomainSpec((cw,))
    assert g.clearance(dom, (0.5, 0.5)) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "build",
    [
        lambda: g.Ball((0, 0), 0),
        lambda: g.Ball((0, 0), -1),
        lambda: g.Rectangle((0, 0), (0, 1)),
        lambda: g.Annulus((0, 0), 2, 1),
        lambda: g.Stadium((0, 0), (0, 0), 1),
        lambda: g.Polygon(((0, 0), (1, 1), (1, 0), (0, 1))),
        lambda: g.Polygon(((0, 0), (1, 0))),
        lambda: g.Polygon(((0, 0), (1, 0), (2, 0))),
        lambda: g.Ball((math.nan, 0), 1),
        lambda: g.DomainSpec(()),
        lambda: g.DomainSpec((g.Ball((0, 0), 1), g.Ball((0, 0), 1))),
        lambda: g.DomainSpec((g.Interval(0, 1), g.Ball((0, 0), 1))),
        lambda: g.linked_balls(2, 1, 0.5),
        lambda: g.linked_balls(1, 2, 1.5),
    ],
)
def test_invalid_inputs_rejected(build):
    with pytest.raises(ValidationError):
        build()


def test_json_round_trip(tmp_path):
    dom = g.DomainSpec(
        (
            g.Ball((0, 0), 1),
            g.Rectangle((0, 0), (2, 1)),
            g.Stadium((0, 0), (1, 1), 0.3),
            g.Annulus((5, 5), 1, 2),
            g.Polygon(((10, 0), (11, 0), (10, 1))),
        )
    )
    path = tmp_path / "d.json"
    path.write_text(json.dumps(dom.to_dict()))
    assert g.load_domain(path) == dom


def test_linked_balls_generator_form():
    dom = g.domain_from_dict({"linked_balls": {"r1": 1, "r2": 2, "gap": 0.5}})
    assert dom == LINKED
    assert LINKED.shapes[1].half_width == 0.5


@pytest.mark.parametrize("text", ["{", "[]", '{"shapes": 3}', '{"shapes": [{"type": "blob"}]}', '{"shapes": [{"type": "ball"}]}'])
def test_bad_json_rejected(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ValidationError):
        g.load_domain(path)


def test_interval_domain():
    iv = g.interval()
    assert g.contains(iv, (0.3, 0))
    assert g.clearance(iv, (0.3, 0)) == pytest.approx(0.3)
    assert g.diameter(iv) == 1.0


def test_diameter():
    assert g.diameter(BALL) == pytest.approx(2.0, rel=1e-5)
    assert g.diameter(SQUARE) == pytest.approx(math.sqrt(2), rel=1e-12)


def test_raster_fallback_within_bound():
    dom = g.DomainSpec((g.Polygon(((0, 0), (3, 0), (3, 1), (1, 1), (1, 3), (0, 3))),))
    raster = g.RasterClearance(dom, h=g.diameter(dom) / 512)
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 3, size=(2000, 2))
    exact = g.arrangement(dom).signed_clearance(pts)
    inside = exact > 0
    assert np.max(np.abs(raster(pts[inside]) - exact[inside])) <= raster.error_bound


# -- properties --------------------------------------------------------------

shapes = st.one_of(
    st.builds(
        lambda x, y, r: g.Ball((x, y), r),
        st.floats(-2, 2),
        st.floats(-2, 2),
        st.floats(0.2, 2),
    ),
    st.builds(
        lambda x, y, w, h: g.Rectangle((x, y), (x + w, y + h)),
        st.floats(-2, 2),
        st.floats(-2, 2),
        st.floats(0.2, 3),
        st.floats(0.2, 3),
    ),
    st.builds(
        lambda x, y, dx, dy, w: g.Stadium((x, y), (x + dx, y + dy), w),
        st.floats(-2, 2),
        st.floats(-2, 2),
        st.floats(0.3, 2),
        st.floats(-1, 1),
        st.floats(0.1, 1),
    ),
)
unions = st.lists(shapes, min_size=1, max_size=3, unique=True).map(lambda s: g.DomainSpec(tuple(s)))


def _inside_points(dom, rng, n=400):
    (x0, y0), (x1, y1) = g.bounding_box(dom)
    pts = rng.uniform((x0, y0), (x1, y1), size=(n, 2))
    return pts, g.arrangement(dom).signed_clearance(pts)


@settings(max_examples=40)
@given(unions, st.integers(0, 2**16))
def test_clearance_is_distance_to_complement(dom, seed):
    rng = np.random.default_rng(seed)
    pts, clr = _inside_points(dom, rng)
    inn, out = pts[clr > 0], pts[clr < 0]
    if len(inn) == 0 or len(out) == 0:
        return
    d = np.sqrt(((inn[:, None, :] - out[None, :, :]) ** 2).sum(-1))
    assert np.all(clr[clr > 0][:, None] <= d + 1e-12)
    # A slightly shrunken ball around each point stays inside.
    theta = rng.uniform(0, 2 * np.pi, size=len(inn))
    probe = inn + 0.99 * clr[clr > 0][:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    assert np.all(g.arrangement(dom).contains(probe))


@settings(max_examples=30)
@given(unions, shapes, st.integers(0, 2**16))
def test_union_monotone(dom, extra, seed):
    if extra in dom.shapes:
        return
    bigger = dom.union(extra)
    rng = np.random.default_rng(seed)
    pts, clr = _inside_points(dom, rng)
    inside = clr > 0
    after = g.arrangement(bigger).signed_clearance(pts[inside])
    assert np.all(after >= clr[inside] - 1e-12)


@settings(max_examples=30)
@given(unions, st.sampled_from([0.5, 2.0, 3.7]), st.integers(0, 2**16))
def test_clearance_scales(dom, s, seed):
    rng = np.random.default_rng(seed)
    pts, clr = _inside_points(dom, rng)
    scaled = g.arrangement(dom.scaled(s)).signed_clearance(pts * s)
    np.testing.assert_allclose(scaled, s * clr, atol=1e-9 * s)


@settings(max_examples=30)
@given(unions, st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**16))
def test_clearance_rigid_motion(dom, angle, dx, dy, seed):
    rng = np.random.default_rng(seed)
    pts, clr = _inside_points(dom, rng)
    c, s = math.cos(angle), math.sin(angle)
    moved = pts @ np.array([[c, s], [-s, c]]) + (dx, dy)
    after = g.arrangement(dom.moved(angle, (dx, dy))).signed_clearance(moved)
    away = np.abs(clr) > 1e-6
    np.testing.assert_allclose(after[away], clr[away], atol=1e-9)
