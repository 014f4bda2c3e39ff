"""Planar domains and the boundary-distance machinery built on them.

Three domain kinds are supported: simple polygons, discs and axis-aligned
ellipses.  Everything here is a pure function of immutable inputs.  The
vectorized ``*_field`` helpers operate on ``(m, 2)`` arrays of points and are
what the quadrature and spectral code use; the scalar wrappers
(:func:`boundary_distance`, :func:`directional_boundary_distance`,
:func:`mean_distance`) validate their input point first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .errors import DomainMembershipError, GeometryError, StarShapeError

TIE_TOL = 1e-12


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def _as_point(p) -> tuple[float, float]:
    x, y = (float(c) for c in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite point ({x}, {y})")
    return x, y


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _segments_intersect(p1, p2, p3, p4) -> bool:
    """Closed-segment intersection test (touching counts)."""
    def orient(a, b, c):
        v = _cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1])
        return 0 if abs(v) <= 1e-14 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return (min(a[0], b[0]) - 1e-14 <= c[0] <= max(a[0], b[0]) + 1e-14
                and min(a[1], b[1]) - 1e-14 <= c[1] <= max(a[1], b[1]) + 1e-14)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and on_seg(p1, p2, p3):
        return True
    if o2 == 0 and on_seg(p1, p2, p4):
        return True
    if o3 == 0 and on_seg(p3, p4, p1):
        return True
    if o4 == 0 and on_seg(p3, p4, p2):
        return True
    return False


def signed_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; vertices are stored counter-clockwise.

    Clockwise input is reversed on construction.  Self-intersecting,
    degenerate or zero-area input raises :class:`GeometryError`.
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(_as_point(p) for p in self.vertices)
        if len(verts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        area = signed_area(verts)
        if not abs(area) > 0.0:
            raise GeometryError("polygon has zero area")
        if area < 0:
            verts = tuple(reversed(verts))
        n = len(verts)
        for i in range(n):
            if verts[i] == verts[(i + 1) % n]:
                raise GeometryError(f"repeated vertex at index {i}")
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or j == (i + 1) % n:
                    continue
                c, d = verts[j], verts[(j + 1) % n]
                if _segments_intersect(a, b, c, d):
                    raise GeometryError(f"polygon is not simple: edges {i} and {j} intersect")
        # adjacent edges folding back onto each other
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            e1 = (b[0] - a[0], b[1] - a[1])
            e2 = (c[0] - b[0], c[1] - b[1])
            if abs(_cross(*e1, *e2)) <= 1e-14 * math.hypot(*e1) * math.hypot(*e2) \
                    and e1[0] * e2[0] + e1[1] * e2[1] < 0:
                raise GeometryError(f"polygon is not simple: spike at vertex {i}")
        object.__setattr__(self, "vertices", verts)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.vertices, dtype=float)
        a.setflags(write=False)
        return a

    @property
    def edges(self):
        """Edge start points and edge vectors, each ``(n, 2)``."""
        a = self.array
        return a, np.roll(a, -1, axis=0) - a


@dataclass(frozen=True)
class Disc:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise GeometryError(f"disc radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse with semi-axes ``a >= b > 0`` along x and y."""

    center: tuple
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b) and a >= b > 0):
            raise GeometryError(f"ellipse needs a >= b > 0, got a={self.a}, b={self.b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


PlanarDomain = Union[Polygon, Disc, Ellipse]


# ---------------------------------------------------------------------------
# construction helpers and I/O
# ---------------------------------------------------------------------------

def unit_square() -> Polygon:
    return Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def rectangle(width, height) -> Polygon:
    return Polygon([(0, 0), (width, 0), (width, height), (0, height)])


def regular_polygon(n, circumradius=1.0, center=(0.0, 0.0)) -> Polygon:
    t = 2 * np.pi * np.arange(n) / n
    return Polygon(np.column_stack([center[0] + circumradius * np.cos(t),
                                    center[1] + circumradius * np.sin(t)]))


def l_shape() -> Polygon:
    return Polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def domain_from_dict(obj) -> PlanarDomain:
    """Build a domain from its JSON object form."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise GeometryError("domain object needs a 'kind' key")
    kind = obj["kind"]
    try:
        if kind == "polygon":
            return Polygon(obj["vertices"])
        if kind == "disc":
            return Disc(obj["center"], obj["radius"])
        if kind == "ellipse":
            return Ellipse(obj["center"], obj["a"], obj["b"])
    except KeyError as exc:
        raise GeometryError(f"domain of kind {kind!r} is missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, GeometryError):
            raise
        raise GeometryError(f"malformed {kind} domain: {exc}") from None
    raise GeometryError(f"unknown domain kind {kind!r}")


def domain_to_dict(domain: PlanarDomain) -> dict:
    if isinstance(domain, Polygon):
        return {"kind": "polygon", "vertices": [list(v) for v in domain.vertices]}
    if isinstance(domain, Disc):
        return {"kind": "disc", "center": list(domain.center), "radius": domain.radius}
    return {"kind": "ellipse", "center": list(domain.center), "a": domain.a, "b": domain.b}


def load_domain(path) -> PlanarDomain:
    with open(path, encoding="utf-8") as fh:
        return domain_from_dict(json.load(fh))


def area(domain: PlanarDomain) -> float:
    if isinstance(domain, Polygon):
        return signed_area(domain.array)
    if isinstance(domain, Disc):
        return math.pi * domain.radius ** 2
    return math.pi * domain.a * domain.b


def centroid(domain: PlanarDomain) -> tuple[float, float]:
    if not isinstance(domain, Polygon):
        return domain.center
    v = domain.array
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    c = x * yn - xn * y
    a6 = 3.0 * np.sum(c)
    return float(np.sum((x + xn) * c) / a6), float(np.sum((y + yn) * c) / a6)


def bounding_box(domain: PlanarDomain):
    """``(xmin, ymin, xmax, ymax)``."""
    if isinstance(domain, Polygon):
        v = domain.array
        return (float(v[:, 0].min()), float(v[:, 1].min()),
                float(v[:, 0].max()), float(v[:, 1].max()))
    cx, cy = domain.center
    if isinstance(domain, Disc):
        hx = hy = domain.radius
    else:
        hx, hy = domain.a, domain.b
    return cx - hx, cy - hy, cx + hx, cy + hy


def scale_domain(domain: PlanarDomain, s: float) -> PlanarDomain:
    """Dilate about the origin by ``s > 0``."""
    if isinstance(domain, Polygon):
        return Polygon(domain.array * s)
    c = (domain.center[0] * s, domain.center[1] * s)
    if isinstance(domain, Disc):
        return Disc(c, domain.radius * s)
    return Ellipse(c, domain.a * s, domain.b * s)


def rigid_motion(domain: PlanarDomain, angle: float, shift=(0.0, 0.0)) -> PlanarDomain:
    """Rotate about the origin by ``angle`` and then translate by ``shift``."""
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    if isinstance(domain, Polygon):
        return Polygon(domain.array @ rot.T + np.asarray(shift))
    center = rot @ np.asarray(domain.center) + np.asarray(shift)
    if isinstance(domain, Disc):
        return Disc(center, domain.radius)
    if abs(math.sin(angle)) > 1e-15:
        raise GeometryError("only axis-aligned ellipses are supported")
    return Ellipse(center, domain.a, domain.b)


# ---------------------------------------------------------------------------
# boundary distance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceEval:
    value: float
    gradient: tuple
    on_medial_axis: bool


def _polygon_distance(poly: Polygon, pts):
    a, e = poly.edges
    rel = pts[:, None, :] - a[None, :, :]                       # (m, k, 2)
    ee = np.sum(e * e, axis=1)
    t = np.clip(np.einsum("mkj,kj->mk", rel, e) / ee, 0.0, 1.0)
    near = a[None, :, :] + t[..., None] * e[None, :, :]
    diff = pts[:, None, :] - near
    dist = np.hypot(diff[..., 0], diff[..., 1])
    d = dist.min(axis=1)
    ties = dist <= d[:, None] + TIE_TOL
    best = np.argmax(ties, axis=1)                            # lowest tied index
    rows = np.arange(len(pts))
    q = near[rows, best]
    gap = np.hypot(near[..., 0] - q[:, None, 0], near[..., 1] - q[:, None, 1])
    medial = np.any(ties & (gap > TIE_TOL), axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        grad = (pts - q) / d[:, None]
    return d, grad, medial


def _disc_distance(disc: Disc, pts):
    rel = pts - np.asarray(disc.center)
    r = np.hypot(rel[:, 0], rel[:, 1])
    d = disc.radius - r
    medial = r <= TIE_TOL
    with np.errstate(invalid="ignore", divide="ignore"):
        grad = -rel / r[:, None]
    grad[medial] = (-1.0, 0.0)
    return d, grad, medial


def _ellipse_nearest(ell: Ellipse, rel, seeds, max_iter=60, tol=1e-13):
    """Newton iteration on the stationarity condition of |B(t) - p|^2."""
    a, b = ell.a, ell.b
    X, Y = rel[:, 0:1], rel[:, 1:2]
    t = seeds.copy()
    k = b * b - a * a
    for _ in range(max_iter):
        s, c = np.sin(t), np.cos(t)
        f = k * s * c + a * X * s - b * Y * c
        fp = k * (c * c - s * s) + a * X * c + b * Y * s
        # negative curvature means a maximum of the distance: push away
        fp = np.where(fp > 1e-14, fp, np.abs(fp) + 1e-3)
        step = np.clip(f / fp, -0.5, 0.5)
        t = t - step
        if np.all(np.abs(step) <= tol):
            break
    qx, qy = a * np.cos(t), b * np.sin(t)
    dist = np.hypot(X - qx, Y - qy)
    return dist, qx, qy


def _ellipse_distance(ell: Ellipse, pts):
    rel = pts - np.asarray(ell.center)
    base = np.arctan2(rel[:, 1] / ell.b, rel[:, 0] / ell.a)[:, None]
    seeds = np.concatenate([base, np.broadcast_to(np.arange(8) * (np.pi / 4), (len(pts), 8))],
                           axis=1)
    dist, qx, qy = _ellipse_nearest(ell, rel, seeds)
    d = dist.min(axis=1)
    ties = dist <= d[:, None] + TIE_TOL
    best = np.argmax(ties, axis=1)
    rows = np.arange(len(pts))
    bx, by = qx[rows, best], qy[rows, best]
    gap = np.hypot(qx - bx[:, None], qy - by[:, None])
    medial = np.any(ties & (gap > 1e-9), axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        grad = np.column_stack([rel[:, 0] - bx, rel[:, 1] - by]) / d[:, None]
    return d, grad, medial


def distance_field(domain: PlanarDomain, pts):
    """Boundary distance, its gradient and the medial-axis flag at many points.

    No membership check is made; for exterior points the value is the distance
    to the boundary but the gradient is meaningless.

    Returns:
        ``(d, grad, medial)`` with shapes ``(m,)``, ``(m, 2)``, ``(m,)``.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(domain, Polygon):
        return _polygon_distance(domain, pts)
    if isinstance(domain, Disc):
        return _disc_distance(domain, pts)
    return _ellipse_distance(domain, pts)


def _polygon_inside(poly: Polygon, pts):
    v = poly.array
    px, py = pts[:, 0:1], pts[:, 1:2]
    x0, y0 = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    straddle = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    crossings = np.sum(straddle & (px < xc), axis=1)
    return crossings % 2 == 1


def contains(domain: PlanarDomain, pts, tol=0.0):
    """True where the point lies strictly inside (boundary distance > tol)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(domain, Polygon):
        inside = _polygon_inside(domain, pts)
        d = _polygon_distance(domain, pts)[0]
        return inside & (d > tol)
    rel = pts - np.asarray(domain.center)
    if isinstance(domain, Disc):
        inside = np.hypot(rel[:, 0], rel[:, 1]) < domain.radius
    else:
        inside = (rel[:, 0] / domain.a) ** 2 + (rel[:, 1] / domain.b) ** 2 < 1.0
    if tol > 0:
        inside = inside & (distance_field(domain, pts)[0] > tol)
    return inside


def _require_inside(domain, p):
    p = np.array([_as_point(p)])
    if not contains(domain, p)[0]:
        x, y = (float(c) for c in p[0])
        raise DomainMembershipError(f"point ({x:.12g}, {y:.12g}) is not strictly inside the domain")
    return p


def boundary_distance(domain: PlanarDomain, p) -> DistanceEval:
    """Exact Euclidean distance from an interior point to the boundary.

    The gradient points from the nearest boundary point towards ``p``.  When
    two boundary features are equidistant (within 1e-12) the point is flagged
    as lying on the medial axis and the gradient comes from the
    lowest-indexed feature.
    """
    pts = _require_inside(domain, p)
    d, grad, medial = distance_field(domain, pts)
    return DistanceEval(float(d[0]), (float(grad[0, 0]), float(grad[0, 1])), bool(medial[0]))


# ---------------------------------------------------------------------------
# ray distance and mean distance
# ---------------------------------------------------------------------------

def ray_distance_field(domain: PlanarDomain, pts, dirs):
    """Two-sided ray distance ``d_nu(p)`` for every point/direction pair.

    Args:
        pts: ``(m, 2)`` interior points.
        dirs: ``(K, 2)`` unit directions.

    Returns:
        ``(m, K)`` array of ``min |t|`` with ``p + t nu`` on the boundary.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    if isinstance(domain, Polygon):
        a, e = domain.edges
        nx, ny = dirs[:, 0][None, :, None], dirs[:, 1][None, :, None]
        ex, ey = e[:, 0][None, None, :], e[:, 1][None, None, :]
        rx = a[:, 0][None, None, :] - pts[:, 0][:, None, None]
        ry = a[:, 1][None, None, :] - pts[:, 1][:, None, None]
        den = nx * ey - ny * ex                                # (1, K, k)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rx * ey - ry * ex) / den
            s = (rx * ny - ry * nx) / den
        hit = (den != 0) & (s >= -1e-12) & (s <= 1 + 1e-12)
        t = np.where(hit, np.abs(t), np.inf)
        return t.min(axis=2)
    if isinstance(domain, Disc):
        a = b = domain.radius
    else:
        a, b = domain.a, domain.b
    rel = pts - np.asarray(domain.center)
    X, Y = rel[:, 0:1], rel[:, 1:2]
    nx, ny = dirs[:, 0][None, :], dirs[:, 1][None, :]
    qa = (nx / a) ** 2 + (ny / b) ** 2
    qb = 2.0 * (X * nx / a ** 2 + Y * ny / b ** 2)
    qc = (X / a) ** 2 + (Y / b) ** 2 - 1.0
    disc = np.sqrt(qb * qb - 4 * qa * qc)
    # numerically stable root pair
    q = -0.5 * (qb + np.copysign(disc, qb))
    t1 = q / qa
    with np.errstate(divide="ignore"):
        t2 = qc / q
    return np.minimum(np.abs(t1), np.abs(t2))


def directional_boundary_distance(domain: PlanarDomain, p, nu) -> float:
    """``inf{|t| : p + t nu not in domain}`` for a (not necessarily unit) direction."""
    nx, ny = _as_point(nu)
    norm = math.hypot(nx, ny)
    if norm == 0.0:
        raise ValueError("direction vector must be nonzero")
    pts = _require_inside(domain, p)
    return float(ray_distance_field(domain, pts, np.array([[nx / norm, ny / norm]]))[0, 0])


def _angles(M):
    phi = np.pi * np.arange(M) / M
    return np.column_stack([np.cos(phi), np.sin(phi)])


def mean_distance_field(domain: PlanarDomain, pts, M=256, chunk=2048):
    """Davies mean distance at many interior points.

    Trapezoidal rule over ``M`` equispaced angles in ``[0, pi)``; the ray
    distance is two-sided so this covers the whole circle.
    """
    if M < 8:
        raise ValueError("need at least 8 angular nodes")
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    dirs = _angles(M)
    out = np.empty(len(pts))
    for i in range(0, len(pts), chunk):
        dn = ray_distance_field(domain, pts[i:i + chunk], dirs)
        out[i:i + chunk] = np.mean(dn ** -2.0, axis=1) ** -0.5
    return out


def mean_distance(domain: PlanarDomain, p, M: int = 256) -> float:
    if M < 8:
        raise ValueError("need at least 8 angular nodes")
    pts = _require_inside(domain, p)
    return float(mean_distance_field(domain, pts, M)[0])


# ---------------------------------------------------------------------------
# polygon predicates: convexity, kernel, eccentricity, exterior cone
# ---------------------------------------------------------------------------

def _turns(poly: Polygon):
    v = poly.array
    e_in = v - np.roll(v, 1, axis=0)
    e_out = np.roll(v, -1, axis=0) - v
    return _cross(e_in[:, 0], e_in[:, 1], e_out[:, 0], e_out[:, 1]), e_in, e_out


def convexity_check(polygon: Polygon) -> bool:
    """All consecutive-edge cross products share one sign (zeros allowed)."""
    cr, _, _ = _turns(polygon)
    scale = np.max(np.abs(cr)) * 1e-12
    return bool(np.all(cr >= -scale) or np.all(cr <= scale))


def interior_angles(polygon: Polygon):
    cr, e_in, e_out = _turns(polygon)
    dot = np.sum(e_in * e_out, axis=1)
    turn = np.arctan2(cr, dot)           # left turn positive for CCW
    return np.pi - turn


def exterior_cone_angle(polygon: PlanarDomain) -> float:
    """Semi-angle of the exterior cone: half the smallest exterior angle, capped at pi/2.

    Smooth convex domains (disc, ellipse) get pi/2.
    """
    if not isinstance(polygon, Polygon):
        return math.pi / 2
    ext = 2 * np.pi - interior_angles(polygon)
    return float(min(math.pi / 2, 0.5 * float(ext.min())))


def clip_halfplane(poly, normal, offset):
    """Clip a convex vertex loop to ``{x : normal . x >= offset}``."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    vals = [normal[0] * p[0] + normal[1] * p[1] - offset for p in poly]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp >= 0:
            out.append(p)
        if (vp >= 0) != (vq >= 0):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def inward_edge_lines(polygon: Polygon):
    """Unit inward normals and offsets: edge i is ``{n_i . x = c_i}``, interior ``>= c_i``."""
    a, e = polygon.edges
    length = np.hypot(e[:, 0], e[:, 1])
    normals = np.column_stack([-e[:, 1], e[:, 0]]) / length[:, None]
    offsets = np.sum(normals * a, axis=1)
    return normals, offsets


def polygon_kernel(polygon: Polygon):
    """Kernel as a CCW vertex list (possibly empty)."""
    xmin, ymin, xmax, ymax = bounding_box(polygon)
    pad = max(xmax - xmin, ymax - ymin)
    loop = [(xmin - pad, ymin - pad), (xmax + pad, ymin - pad),
            (xmax + pad, ymax + pad), (xmin - pad, ymax + pad)]
    normals, offsets = inward_edge_lines(polygon)
    for nrm, off in zip(normals, offsets):
        loop = clip_halfplane(loop, nrm, off)
        if not loop:
            break
    return loop


@dataclass(frozen=True)
class StarShapeData:
    center: tuple
    inner_radius: float
    outer_radius: float
    eccentricity: float
    grid_eccentricity: float = math.nan


def _kernel_radius_ratio(k_normals, k_offsets, verts, cx, cy):
    r = np.min(k_normals[:, 0] * cx[..., None] + k_normals[:, 1] * cy[..., None] - k_offsets,
               axis=-1)
    R = np.max(np.hypot(cx[..., None] - verts[:, 0], cy[..., None] - verts[:, 1]), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = np.where(r > 0, R / r, np.inf)
    return eta, r, R


def _loop_lines(loop):
    v = np.asarray(loop, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    length = np.hypot(e[:, 0], e[:, 1])
    keep = length > 1e-15
    v, e, length = v[keep], e[keep], length[keep]
    normals = np.column_stack([-e[:, 1], e[:, 0]]) / length[:, None]
    return normals, np.sum(normals * v, axis=1)


def star_shape_analysis(polygon: PlanarDomain, grid: int = 200, tol: float = 1e-9) -> StarShapeData:
    """Best eccentricity ``eta = R/r`` over centres in the kernel.

    For a centre ``c`` in the kernel, ``r(c)`` is the distance to the kernel
    boundary (so the disc of radius ``r`` lies in the kernel) and ``R(c)`` the
    largest distance to a vertex.  A grid of pitch ``diam/grid``, anchored at
    the kernel centroid, seeds a compass/diagonal pattern search that halves
    its step down to ``tol``.

    Discs and ellipses are handled analytically (``eta = 1`` and ``a/b``).
    """
    if isinstance(polygon, Disc):
        return StarShapeData(polygon.center, polygon.radius, polygon.radius, 1.0, 1.0)
    if isinstance(polygon, Ellipse):
        eta = polygon.a / polygon.b
        return StarShapeData(polygon.center, polygon.b, polygon.a, eta, eta)
    loop = polygon_kernel(polygon)
    if len(loop) < 3 or abs(signed_area(loop)) <= 1e-14 * area(polygon):
        raise StarShapeError("polygon is not star-shaped with respect to any disc (empty kernel)")
    k_normals, k_offsets = _loop_lines(loop)
    verts = polygon.array
    kv = np.asarray(loop)
    diam = float(np.max(np.hypot(kv[:, None, 0] - kv[None, :, 0], kv[:, None, 1] - kv[None, :, 1])))
    h = diam / grid
    kc = centroid(Polygon(loop))
    lo = np.floor((kv.min(axis=0) - kc) / h)
    hi = np.ceil((kv.max(axis=0) - kc) / h)
    gx = kc[0] + h * np.arange(lo[0], hi[0] + 1)
    gy = kc[1] + h * np.arange(lo[1], hi[1] + 1)
    cx, cy = np.meshgrid(gx, gy, indexing="ij")
    eta, _, _ = _kernel_radius_ratio(k_normals, k_offsets, verts, cx, cy)
    i, j = np.unravel_index(np.argmin(eta), eta.shape)
    grid_eta = float(eta[i, j])
    best = np.array([cx[i, j], cy[i, j]])

    def f(p):
        return float(_kernel_radius_ratio(k_normals, k_offsets, verts,
                                          np.array(p[0]), np.array(p[1]))[0])

    fbest = f(best)
    dirs = np.array([(1, 0), (-1, 0), (0, 1), (0, -1),
                     (1, 1), (1, -1), (-1, 1), (-1, -1)], dtype=float)
    dirs[4:] /= math.sqrt(2.0)
    step = h
    while step > tol:
        moved = False
        for dvec in dirs:
            cand = best + step * dvec
            fc = f(cand)
            if fc < fbest:
                best, fbest, moved = cand, fc, True
                break
        if not moved:
            step *= 0.5
    _, r, R = _kernel_radius_ratio(k_normals, k_offsets, verts,
                                   np.array(best[0]), np.array(best[1]))
    return StarShapeData((float(best[0]), float(best[1])), float(r), float(R), fbest, grid_eta)
