import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from domainconst.geometry import (Disc, Ellipse, Polygon, area, contains, distance_field,
                                  l_shape, regular_polygon, signed_area,
                                  unit_square)
from domainconst.quadrature import (MAX_ORDER, area_check, build_quadrature, ear_clip,
                                    nearest_edge_cells, triangle_rule, triangles_rule)


def barycentric_monomial_integral(a, b, c, area_t):
    # int_T l1^a l2^b l3^c = 2|T| a! b! c! / (a+b+c+2)!
    return 2 * area_t * math.factorial(a) * math.factorial(b) * math.factorial(c) \
        / math.factorial(a + b + c + 2)


def test_reference_triangle_weights():
    for order in (1, 2, 5, 10, 20, 52):
        x, w = triangle_rule(order)
        assert np.all(w > 0)
        assert w.sum() == pytest.approx(0.5, abs=1e-15)
        assert np.all(x > 0) and np.all(x.sum(axis=1) < 1)


def test_square_area_and_monomial():
    rule = build_quadrature(unit_square(), 6)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-15)
    x, y = rule.nodes.T
    assert rule.integrate(x ** 2 * y ** 2) == pytest.approx(1 / 9, abs=1e-15)


def test_polygon_areas_exact():
    for poly in (unit_square(), regular_polygon(6), l_shape(),
                 Polygon([(0, 0), (4, 0), (4, 1), (1, 1), (1, 3), (0, 3)])):
        for ref in (0, 2):
            rule = build_quadrature(poly, 4, ref)
            assert area_check(rule, poly) < 1e-13
            assert contains(poly, rule.nodes).all()


def test_curved_area_at_refinement_four():
    for dom in (Disc((0.0, 0.0), 1.0), Ellipse((1.0, 2.0), 3.0, 0.5)):
        rule = build_quadrature(dom, 6, 4)
        assert area_check(rule, dom) < 1e-12
        assert np.all(rule.weights > 0)


def test_disc_polar_moment():
    # int_disc r^2 = pi/2
    rule = build_quadrature(Disc((0, 0), 1.0), 8, 1)
    x, y = rule.nodes.T
    assert rule.integrate(x * x + y * y) == pytest.approx(math.pi / 2, rel=1e-13)


def test_convex_cells_make_distance_affine():
    # int over the unit square of d = 1/6
    rule = build_quadrature(unit_square(), 3)
    d = distance_field(unit_square(), rule.nodes)[0]
    assert rule.integrate(d) == pytest.approx(1 / 6, abs=1e-15)
    # int d^2 = 1/24
    assert rule.integrate(d ** 2) == pytest.approx(1 / 24, abs=1e-15)


def test_nearest_edge_cells_cover_polygon():
    hexa = regular_polygon(6)
    cells = nearest_edge_cells(hexa)
    assert len(cells) == 6
    assert sum(signed_area(c) for c in cells) == pytest.approx(area(hexa), abs=1e-14)


def test_ear_clip_counts():
    tris = ear_clip(l_shape().vertices)
    assert len(tris) == 4


def test_order_validation():
    with pytest.raises(ValueError):
        build_quadrature(unit_square(), 0)
    with pytest.raises(ValueError):
        build_quadrature(unit_square(), MAX_ORDER + 1)
    with pytest.raises(ValueError):
        build_quadrature(unit_square(), 4, -1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_triangle_rule_exact_on_barycentric_monomials(coords, a, b, c):
    v = np.array(coords).reshape(3, 2)
    e1, e2 = v[1] - v[0], v[2] - v[0]
    area_t = abs(e1[0] * e2[1] - e1[1] * e2[0]) / 2
    if area_t < 1e-2:
        return
    order = a + b + c
    rule = triangles_rule([v], max(order, 1))
    # barycentric coordinates of the nodes
    M = np.column_stack([e1, e2])
    lam = np.linalg.solve(M, (rule.nodes - v[0]).T).T
    l1 = 1 - lam.sum(axis=1)
    val = rule.integrate(l1 ** a * lam[:, 0] ** b * lam[:, 1] ** c)
    ref = barycentric_monomial_integral(a, b, c, area_t)
    assert val == pytest.approx(ref, rel=1e-11, abs=1e-14)
