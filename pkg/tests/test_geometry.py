import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from domainconst.errors import DomainMembershipError, GeometryError, StarShapeError
from domainconst.geometry import (Disc, Ellipse, Polygon, area, boundary_distance, centroid,
                                  contains, convexity_check, directional_boundary_distance,
                                  distance_field, domain_from_dict, domain_to_dict,
                                  exterior_cone_angle, interior_angles, l_shape, load_domain,
                                  mean_distance, mean_distance_field, polygon_kernel,
                                  rectangle, regular_polygon, rigid_motion, scale_domain,
                                  star_shape_analysis, unit_square)

# closed form 1/(2 sqrt(1/2 + 1/pi)), see tests/oracles.py
SQUARE_CENTER_D = 0.5527275415390739


def brute_polygon_distance(vertices, p):
    v = np.asarray(vertices, float)
    best = np.inf
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        e = b - a
        t = np.clip(np.dot(p - a, e) / np.dot(e, e), 0.0, 1.0)
        best = min(best, np.linalg.norm(p - (a + t * e)))
    return best


def test_polygon_orientation_and_validation():
    cw = Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert area(cw) == pytest.approx(1.0)
    assert cw.vertices == ((1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0))
    with pytest.raises(GeometryError):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])          # bow tie
    with pytest.raises(GeometryError):
        Polygon([(0, 0), (1, 0)])
    with pytest.raises(GeometryError):
        Polygon([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(GeometryError):
        Disc((0, 0), -1.0)
    with pytest.raises(GeometryError):
        Ellipse((0, 0), 1.0, 2.0)


def test_domain_roundtrip(tmp_path):
    for dom in (unit_square(), Disc((1.0, 2.0), 0.5), Ellipse((0, 0), 2.0, 1.0)):
        assert domain_from_dict(domain_to_dict(dom)) == dom
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"kind": "disc", "center": [0, 0], "radius": 1}))
    assert load_domain(p) == Disc((0.0, 0.0), 1.0)
    with pytest.raises(GeometryError):
        domain_from_dict({"kind": "annulus"})
    with pytest.raises(GeometryError):
        domain_from_dict({"kind": "disc", "center": [0, 0]})


def test_square_distance_and_gradient():
    ev = boundary_distance(unit_square(), (0.25, 0.5))
    assert ev.value == pytest.approx(0.25, abs=1e-15)
    assert np.allclose(ev.gradient, (1.0, 0.0))
    assert not ev.on_medial_axis


def test_disc_center_is_medial():
    ev = boundary_distance(Disc((0, 0), 1.0), (0.0, 0.0))
    assert ev.value == 1.0
    assert ev.on_medial_axis
    assert np.linalg.norm(ev.gradient) == pytest.approx(1.0)


def test_square_diagonal_is_medial():
    ev = boundary_distance(unit_square(), (0.3, 0.3))
    assert ev.on_medial_axis
    assert ev.value == pytest.approx(0.3)


def test_exterior_point_rejected():
    with pytest.raises(DomainMembershipError):
        boundary_distance(unit_square(), (1.5, 0.5))
    with pytest.raises(DomainMembershipError):
        boundary_distance(unit_square(), (1.0, 0.5))       # on the boundary


def test_ellipse_distance_matches_dense_sampling():
    ell = Ellipse((0.3, -0.2), 2.0, 0.7)
    t = np.linspace(0, 2 * np.pi, 400_001)
    bx = 0.3 + 2.0 * np.cos(t)
    by = -0.2 + 0.7 * np.sin(t)
    rng = np.random.default_rng(1)
    pts = []
    while len(pts) < 25:
        p = rng.uniform((-1.7, -0.9), (2.3, 0.5))
        if ((p[0] - 0.3) / 2.0) ** 2 + ((p[1] + 0.2) / 0.7) ** 2 < 0.95:
            pts.append(p)
    pts = np.array(pts)
    d, g, _ = distance_field(ell, pts)
    for p, dv, gv in zip(pts, d, g):
        dense = np.min(np.hypot(bx - p[0], by - p[1]))
        assert dv <= dense + 1e-12
        assert dv == pytest.approx(dense, abs=1e-8)
        assert np.linalg.norm(gv) == pytest.approx(1.0)


def test_directional_distance():
    sq = unit_square()
    assert directional_boundary_distance(sq, (0.25, 0.5), (1, 0)) == pytest.approx(0.25)
    assert directional_boundary_distance(sq, (0.25, 0.5), (0, 3)) == pytest.approx(0.5)
    assert directional_boundary_distance(Disc((0, 0), 1), (0.5, 0), (0, 1)) == \
        pytest.approx(math.sqrt(0.75))
    with pytest.raises(ValueError):
        directional_boundary_distance(sq, (0.5, 0.5), (0, 0))


def test_mean_distance_closed_forms():
    assert mean_distance(Disc((0, 0), 1.0), (0, 0)) == pytest.approx(1.0, abs=1e-14)
    assert mean_distance(unit_square(), (0.5, 0.5), M=4096) == \
        pytest.approx(SQUARE_CENTER_D, rel=1e-7)
    with pytest.raises(ValueError):
        mean_distance(unit_square(), (0.5, 0.5), M=4)


def test_mean_distance_converges_in_directions():
    a = mean_distance(l_shape(), (0.4, 0.3), M=2048)
    b = mean_distance(l_shape(), (0.4, 0.3), M=4096)
    assert abs(a - b) < 1e-6 * a


def test_convexity_and_angles():
    assert convexity_check(unit_square())
    assert convexity_check(regular_polygon(6))
    assert not convexity_check(l_shape())
    angs = interior_angles(l_shape())
    assert max(angs) == pytest.approx(1.5 * math.pi)
    assert exterior_cone_angle(l_shape()) == pytest.approx(math.pi / 4)
    assert exterior_cone_angle(unit_square()) == pytest.approx(math.pi / 2)
    assert exterior_cone_angle(Disc((0, 0), 1)) == pytest.approx(math.pi / 2)
    # acute triangle corner: exterior half-angle capped at pi/2
    tri = Polygon([(0, 0), (1, 0), (0, 1)])
    assert exterior_cone_angle(tri) == pytest.approx(math.pi / 2)


def test_kernel():
    k = polygon_kernel(l_shape())
    assert area(Polygon(k)) == pytest.approx(1.0)
    star = Polygon([(0, 0), (2, 0), (2, 2), (1, 0.8), (0, 2)])
    assert area(Polygon(polygon_kernel(star))) > 0
    comb = Polygon([(0, 0), (5, 0), (5, 3), (4, 3), (4, 1), (3, 1), (3, 3), (2, 3),
                    (2, 1), (1, 1), (1, 3), (0, 3)])
    with pytest.raises(StarShapeError):
        star_shape_analysis(comb)


def test_eccentricity_known_shapes():
    sq = star_shape_analysis(unit_square())
    assert sq.eccentricity == pytest.approx(math.sqrt(2), abs=1e-6)
    assert np.allclose(sq.center, (0.5, 0.5), atol=1e-6)
    hexa = star_shape_analysis(regular_polygon(6))
    assert hexa.eccentricity == pytest.approx(2 / math.sqrt(3), abs=1e-6)
    assert star_shape_analysis(Disc((0, 0), 3.0)).eccentricity == 1.0
    assert star_shape_analysis(Ellipse((0, 0), 3.0, 2.0)).eccentricity == 1.5


def test_eccentricity_l_shape():
    data = star_shape_analysis(l_shape())
    # centre (1/2, 1/2): r = 1/2 to the kernel edges, R = sqrt(10)/2
    assert data.eccentricity == pytest.approx(math.sqrt(10), rel=1e-6)
    assert data.grid_eccentricity >= data.eccentricity - 1e-12


def test_affine_helpers():
    sq = unit_square()
    assert area(scale_domain(sq, 3.0)) == pytest.approx(9.0)
    moved = rigid_motion(sq, 0.3, (1.0, -2.0))
    assert area(moved) == pytest.approx(1.0)
    c = centroid(moved)
    assert boundary_distance(moved, c).value == pytest.approx(0.5)
    assert centroid(rectangle(3, 1)) == pytest.approx((1.5, 0.5))


def test_contains_vectorized():
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]])
    assert contains(l_shape(), pts).tolist() == [True, True, False, True]


@st.composite
def convex_polygon_and_point(draw):
    n = draw(st.integers(3, 9))
    s = draw(st.floats(0.1, 10.0))
    ang = draw(st.floats(0, 2 * math.pi))
    poly = rigid_motion(scale_domain(regular_polygon(n), s), ang,
                        (draw(st.floats(-5, 5)), draw(st.floats(-5, 5))))
    u = draw(st.floats(0.0, 0.9))
    t = draw(st.floats(0, 2 * math.pi))
    c = np.array(centroid(poly))
    r_in = s * math.cos(math.pi / n)
    p = c + u * r_in * np.array([math.cos(t), math.sin(t)])
    return poly, p


@settings(max_examples=60, deadline=None)
@given(convex_polygon_and_point())
def test_distance_matches_brute_force(data):
    poly, p = data
    ev = boundary_distance(poly, p)
    ref = brute_polygon_distance(poly.vertices, p)
    assert ev.value == pytest.approx(ref, rel=1e-12, abs=1e-12)
    assert np.linalg.norm(ev.gradient) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(convex_polygon_and_point())
def test_distance_below_mean_distance(data):
    poly, p = data
    d = boundary_distance(poly, p).value
    D = mean_distance_field(poly, p[None, :], M=64)[0]
    assert d <= D * (1 + 1e-12)
