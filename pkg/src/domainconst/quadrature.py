"""Quadrature rules over planar domains.

Polygons are split into triangles, each triangle optionally refined by
midpoint subdivision, and every triangle carries a conical-product Gauss rule
(Gauss-Jacobi times Gauss-Legendre through the collapsed square).  Discs and
ellipses use mapped polar cells with tensor Gauss-Legendre rules.

Convex polygons are first cut into the cells where a single edge is nearest,
so the boundary distance is affine on every triangle and integrands built
from it stay polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import GeometryError
from .geometry import (Disc, Ellipse, Polygon, PlanarDomain, area, clip_halfplane,
                       convexity_check, inward_edge_lines, signed_area)

MAX_ORDER = 52


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes ``(m, 2)`` and positive weights ``(m,)`` over a domain."""

    nodes: np.ndarray
    weights: np.ndarray
    declared_order: int
    refinement: int = 0

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def triangle_rule(order: int):
    """Reference-triangle rule exact for total degree ``order``.

    Returns barycentric-style coordinates ``(xi, eta)`` and weights summing to
    1/2 (the reference area).
    """
    n = max(1, math.ceil((order + 1) / 2))
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    xl, wl = roots_legendre(n)
    u = 0.5 * (1.0 + xj)
    wu = 0.25 * wj
    v = 0.5 * (1.0 + xl)
    wv = 0.5 * wl
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    xi = U.ravel()
    eta = ((1.0 - U) * V).ravel()
    return np.column_stack([xi, eta]), W.ravel()


@lru_cache(maxsize=None)
def _gauss01(n: int):
    x, w = roots_legendre(n)
    return 0.5 * (1.0 + x), 0.5 * w


def _drop_collinear(loop):
    out = list(loop)
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            scale = math.hypot(b[0] - a[0], b[1] - a[1]) * math.hypot(c[0] - b[0], c[1] - b[1])
            if abs(cr) <= 1e-14 * scale:
                del out[i]
                changed = True
                break
    return out


def _point_in_triangle(p, a, b, c, eps=0.0):
    # points on an edge (within eps) count as inside, so the ear is rejected
    # the same way whatever rounding a rotation introduces
    def cr(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
    return cr(a, b, p) >= -eps and cr(b, c, p) >= -eps and cr(c, a, p) >= -eps


def ear_clip(vertices):
    """Triangulate a simple CCW polygon; returns a list of vertex triples."""
    loop = _drop_collinear([tuple(v) for v in vertices])
    xs = [v[0] for v in loop]
    ys = [v[1] for v in loop]
    eps = 1e-10 * ((max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2)
    tris = []
    guard = 0
    while len(loop) > 3:
        n = len(loop)
        for i in range(n):
            a, b, c = loop[i - 1], loop[i], loop[(i + 1) % n]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= eps:
                continue
            if any(_point_in_triangle(p, a, b, c, eps) for p in loop if p not in (a, b, c)):
                continue
            tris.append((a, b, c))
            del loop[i]
            break
        else:
            raise GeometryError("ear clipping failed: polygon is not simple")
        guard += 1
        if guard > 10 * len(vertices):
            raise GeometryError("ear clipping did not terminate")
    tris.append(tuple(loop))
    return tris


def fan(loop):
    return [(loop[0], loop[i], loop[i + 1]) for i in range(1, len(loop) - 1)]


def nearest_edge_cells(polygon: Polygon):
    """Cells of a convex polygon on which one edge line is the nearest.

    On cell ``i`` the boundary distance equals the distance to edge line ``i``.
    """
    normals, offsets = inward_edge_lines(polygon)
    base = [tuple(v) for v in polygon.array]
    cells = []
    scale = max(1.0, float(np.max(np.abs(offsets))))
    for i in range(len(normals)):
        # collinear edges share a line; keep only the first of them
        same = [j for j in range(i) if np.allclose(normals[j], normals[i], atol=1e-12)
                and abs(offsets[j] - offsets[i]) <= 1e-12 * scale]
        if same:
            continue
        loop = base
        for j in range(len(normals)):
            if j == i:
                continue
            # l_j(x) - l_i(x) >= 0
            loop = clip_halfplane(loop, normals[j] - normals[i], offsets[j] - offsets[i])
            if not loop:
                break
        if len(loop) >= 3 and signed_area(loop) > 1e-14 * abs(signed_area(base)):
            cells.append(_drop_collinear(loop))
    return cells


def triangulate(polygon: Polygon):
    if convexity_check(polygon):
        tris = []
        for cell in nearest_edge_cells(polygon):
            tris.extend(fan(cell))
        return tris
    return ear_clip(polygon.vertices)


def _subdivide(tris: np.ndarray, levels: int) -> np.ndarray:
    """Midpoint 1-to-4 subdivision; ``tris`` has shape ``(t, 3, 2)``."""
    for _ in range(levels):
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
        tris = np.concatenate([
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ])
    return tris


def _drop_slivers(tris: np.ndarray) -> np.ndarray:
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    jac = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    return tris[jac > 1e-12 * jac.sum()]


def triangles_rule(tris, order: int, refinement: int = 0) -> QuadratureRule:
    tris = _subdivide(_drop_slivers(np.asarray(tris, dtype=float)), refinement)
    ref, w = triangle_rule(order)
    a = tris[:, 0]
    e1 = tris[:, 1] - a
    e2 = tris[:, 2] - a
    jac = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    nodes = (a[:, None, :] + ref[None, :, 0:1] * e1[:, None, :]
             + ref[None, :, 1:2] * e2[:, None, :]).reshape(-1, 2)
    weights = (jac[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights, order, refinement)


def _polar_rule(center, a, b, order, refinement) -> QuadratureRule:
    n = max(1, math.ceil((order + 2) / 2))
    nr = 2 ** refinement
    nt = 4 * 2 ** refinement
    x, w = _gauss01(n)
    r = ((np.arange(nr)[:, None] + x[None, :]) / nr).ravel()
    wr = np.tile(w / nr, nr) * r
    t = ((np.arange(nt)[:, None] + x[None, :]) * (2 * np.pi / nt)).ravel()
    wt = np.tile(w * (2 * np.pi / nt), nt)
    R, T = np.meshgrid(r, t, indexing="ij")
    nodes = np.column_stack([center[0] + a * (R * np.cos(T)).ravel(),
                             center[1] + b * (R * np.sin(T)).ravel()])
    weights = (a * b) * np.outer(wr, wt).ravel()
    return QuadratureRule(nodes, weights, order, refinement)


def build_quadrature(domain: PlanarDomain, order: int, refinement: int = 0) -> QuadratureRule:
    """Quadrature over ``domain`` exact (on polygons) for total degree ``order``.

    Args:
        order: polynomial order per cell, 1..52.
        refinement: subdivision levels; each level quarters triangles, or
            doubles the radial and angular cell counts of curved domains.
    """
    if not (1 <= int(order) <= MAX_ORDER):
        raise ValueError(f"quadrature order must be in [1, {MAX_ORDER}], got {order}")
    if refinement < 0:
        raise ValueError("refinement must be >= 0")
    order = int(order)
    if isinstance(domain, Polygon):
        return triangles_rule(triangulate(domain), order, refinement)
    if isinstance(domain, Disc):
        return _polar_rule(domain.center, domain.radius, domain.radius, order, refinement)
    if isinstance(domain, Ellipse):
        return _polar_rule(domain.center, domain.a, domain.b, order, refinement)
    raise GeometryError(f"unsupported domain type {type(domain).__name__}")


def default_refinement(domain: PlanarDomain, degree: int) -> int:
    """Refinement used by the estimators for a basis of the given degree.

    Convex polygons are integrated exactly without refinement.  Non-convex
    polygons, where the boundary distance has kinks inside cells, use three
    levels below degree 6 and four from there on; curved domains use four.
    """
    if isinstance(domain, Polygon):
        if convexity_check(domain):
            return 0
        return 3 if degree < 6 else 4
    return 4


def area_check(rule: QuadratureRule, domain: PlanarDomain) -> float:
    """Relative deviation of the weight sum from the exact area."""
    a = area(domain)
    return abs(float(np.sum(rule.weights)) - a) / a
