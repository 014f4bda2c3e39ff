"""Rayleigh-quotient lower bounds for the Friedrichs-Velte, improved Poincare
and Hardy constants of a planar domain.

Each estimator maximizes a quotient of two quadratic forms over an explicit
finite-dimensional trial space, which is a symmetric generalized eigenvalue
problem.  Trial spaces for increasing degree are nested (the basis of degree
``N`` is a prefix of the basis of degree ``N + 1``), so a convergence study
assembles once at the top degree and slices leading blocks.

Trial spaces:

* ``conjugate_harmonic_pairs`` - real and imaginary rotations of ``w**k``,
  ``w = (z - z0) / rho``, ``k = 1..N``; each basis element is a pair
  ``(u, v)`` satisfying the Cauchy-Riemann equations.
* ``centered_polynomials`` - polynomials of total degree ``1..N`` (no
  constant term), as tensor Legendre products in normalized coordinates.
* ``distance_weighted_polynomials`` - ``d(x) q(x)`` with ``q`` of total
  degree ``0..N``; these vanish on the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eigen import sym_generalized_eigen_max
from .errors import FormError, DomainConstError
from .geometry import Disc, Ellipse, PlanarDomain, Polygon, centroid, distance_field
from .quadrature import QuadratureRule, build_quadrature, default_refinement

FAMILIES = ("conjugate_harmonic_pairs", "centered_polynomials", "distance_weighted_polynomials")
FORMS = ("l2_centered", "l2_plain", "weighted_gradient_d2", "gradient", "inverse_d2")
CONSTANTS = ("gamma", "poincare", "hardy")
MAX_DEGREE = 24


@dataclass(frozen=True)
class BasisSpec:
    family: str
    degree: int
    center: Optional[tuple] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown basis family {self.family!r}")
        lo = 0 if self.family == "distance_weighted_polynomials" else 1
        if not (lo <= self.degree <= MAX_DEGREE):
            raise ValueError(f"degree {self.degree} outside [{lo}, {MAX_DEGREE}] for {self.family}")

    @property
    def size(self) -> int:
        return basis_size(self.family, self.degree)


def basis_size(family: str, degree: int) -> int:
    if family == "conjugate_harmonic_pairs":
        return 2 * degree
    if family == "centered_polynomials":
        return (degree + 1) * (degree + 2) // 2 - 1
    return (degree + 1) * (degree + 2) // 2


@dataclass(frozen=True)
class RayleighEstimate:
    constant_name: str
    value: float
    degree: int
    quadrature_order: int
    history: tuple = ()
    coefficients: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "constant": self.constant_name,
            "value": self.value,
            "degree": self.degree,
            "quadrature_order": self.quadrature_order,
            "history": [[n, v] for n, v in self.history],
        }


class EstimatorError(DomainConstError):
    """Estimator failure during a convergence study.

    ``partial`` holds the estimate up to ``last_degree`` (the last degree
    that succeeded), or None when no degree succeeded.
    """

    def __init__(self, message, cause, partial=None, last_degree=None):
        super().__init__(message)
        self.cause = cause
        self.partial = partial
        self.last_degree = last_degree


# ---------------------------------------------------------------------------
# basis evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Frame:
    """Centre, orthonormal axes and half-widths used to normalize a basis."""

    x0: float
    y0: float
    axes: np.ndarray        # rows are the two unit axes
    h: tuple
    rho: float


def _second_moments(domain: PlanarDomain, x0, y0):
    if isinstance(domain, Polygon):
        v = domain.array - (x0, y0)
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        ixx = np.sum(cr * (x * x + x * xn + xn * xn)) / 12.0
        iyy = np.sum(cr * (y * y + y * yn + yn * yn)) / 12.0
        ixy = np.sum(cr * (x * yn + 2 * x * y + 2 * xn * yn + xn * y)) / 24.0
        return np.array([[ixx, ixy], [ixy, iyy]])
    if isinstance(domain, Disc):
        return np.eye(2)
    return np.diag([domain.a ** 2, domain.b ** 2])


def _frame(domain: PlanarDomain, center=None) -> _Frame:
    """Principal-axis frame of the domain.

    Axes follow the area second moments, so the frame (and the conditioning
    of the Gram matrices) moves with the domain under rotations.  When the
    moments are isotropic the first axis points to the farthest vertex.
    """
    x0, y0 = centroid(domain) if center is None else (float(center[0]), float(center[1]))
    if isinstance(domain, Disc):
        r = domain.radius + float(np.hypot(x0 - domain.center[0], y0 - domain.center[1]))
        return _Frame(x0, y0, np.eye(2), (r, r), r)
    if isinstance(domain, Ellipse):
        ex = domain.a + abs(x0 - domain.center[0])
        ey = domain.b + abs(y0 - domain.center[1])
        return _Frame(x0, y0, np.eye(2), (ex, ey), max(ex, ey))
    rel = domain.array - (x0, y0)
    dist = np.hypot(rel[:, 0], rel[:, 1])
    rho = float(dist.max())
    w, vec = np.linalg.eigh(_second_moments(domain, *centroid(domain)))
    if w[1] - w[0] <= 1e-9 * (w[0] + w[1]):
        k = int(np.flatnonzero(dist >= rho * (1 - 1e-9))[0])
        e1 = rel[k] / dist[k]
    else:
        e1 = vec[:, 1]
    axes = np.array([e1, [-e1[1], e1[0]]])
    proj = rel @ axes.T
    h = tuple(float(t) for t in np.max(np.abs(proj), axis=0))
    return _Frame(x0, y0, axes, h, rho)


def _legendre(x, n):
    """Legendre values and derivatives ``P_0..P_n`` at ``x``, shape ``(n+1, m)``."""
    P = np.empty((n + 1,) + x.shape)
    dP = np.empty_like(P)
    P[0], dP[0] = 1.0, 0.0
    if n >= 1:
        P[1], dP[1] = x, 1.0
    for k in range(1, n):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
        dP[k + 1] = dP[k - 1] + (2 * k + 1) * P[k]
    return P, dP


def _poly_index(degree, min_total):
    return [(i, t - i) for t in range(min_total, degree + 1) for i in range(t, -1, -1)]


def _polynomials(pts, degree, min_total, frame: _Frame):
    rel = pts - (frame.x0, frame.y0)
    h1, h2 = frame.h
    (a1, a2) = frame.axes
    xi = rel @ a1 / h1
    eta = rel @ a2 / h2
    Px, dPx = _legendre(xi, degree)
    Py, dPy = _legendre(eta, degree)
    idx = _poly_index(degree, min_total)
    vals = np.stack([Px[i] * Py[j] for i, j in idx], axis=1)
    gxi = np.stack([dPx[i] * Py[j] for i, j in idx], axis=1) / h1
    geta = np.stack([Px[i] * dPy[j] for i, j in idx], axis=1) / h2
    gx = gxi * a1[0] + geta * a2[0]
    gy = gxi * a1[1] + geta * a2[1]
    return vals, np.stack([gx, gy], axis=2)


def _conjugate_pairs(pts, degree, frame: _Frame):
    rho = frame.rho
    w = ((pts[:, 0] - frame.x0) + 1j * (pts[:, 1] - frame.y0)) / rho
    u_cols, v_cols, ug_cols, vg_cols = [], [], [], []
    wk_1 = np.ones_like(w)
    for k in range(1, degree + 1):
        wk = wk_1 * w
        dwk = k * wk_1 / rho          # derivative of w**k with respect to z
        # f = w**k: u = Re f, v = Im f ; f = i w**k: u = -Im f, v = Re f
        u_cols += [wk.real, -wk.imag]
        v_cols += [wk.imag, wk.real]
        # grad Re g = (Re g', -Im g'), grad Im g = (Im g', Re g')
        ug_cols += [(dwk.real, -dwk.imag), (-dwk.imag, -dwk.real)]
        vg_cols += [(dwk.imag, dwk.real), (dwk.real, -dwk.imag)]
        wk_1 = wk
    u = np.stack(u_cols, axis=1)
    v = np.stack(v_cols, axis=1)
    ug = np.stack([np.stack(g, axis=1) for g in ug_cols], axis=1)
    vg = np.stack([np.stack(g, axis=1) for g in vg_cols], axis=1)
    return u, ug, v, vg


@dataclass
class BasisValues:
    """Basis functions sampled at quadrature nodes.

    ``values`` is ``(m, k)`` and ``grads`` ``(m, k, 2)``.  ``conjugate`` and
    ``conjugate_grads`` hold the ``v`` components of conjugate pairs;
    ``core`` holds the polynomial factor ``q`` of distance-weighted
    functions.
    """

    values: np.ndarray
    grads: np.ndarray
    dist: Optional[np.ndarray] = None
    conjugate: Optional[np.ndarray] = None
    conjugate_grads: Optional[np.ndarray] = None
    core: Optional[np.ndarray] = None


def evaluate_basis(domain: PlanarDomain, basis: BasisSpec, nodes, dist=None) -> BasisValues:
    """Sample ``basis`` at ``nodes``; ``dist`` may pass precomputed ``(d, grad_d)``."""
    nodes = np.asarray(nodes, dtype=float)
    norm = _frame(domain, basis.center)
    if basis.family == "conjugate_harmonic_pairs":
        u, ug, v, vg = _conjugate_pairs(nodes, basis.degree, norm)
        return BasisValues(u, ug, conjugate=v, conjugate_grads=vg)
    if dist is None:
        d, gd, _ = distance_field(domain, nodes)
    else:
        d, gd = dist
    if basis.family == "centered_polynomials":
        vals, grads = _polynomials(nodes, basis.degree, 1, norm)
        return BasisValues(vals, grads, dist=d)
    q, gq = _polynomials(nodes, basis.degree, 0, norm)
    vals = d[:, None] * q
    grads = q[..., None] * gd[:, None, :] + d[:, None, None] * gq
    return BasisValues(vals, grads, dist=d, core=q)


def _gram_values(f, w):
    f = np.ascontiguousarray(f)
    g = (f * w[:, None]).T @ f
    return 0.5 * (g + g.T)


def _gram_grads(g, w):
    out = _gram_values(g[..., 0], w) + _gram_values(g[..., 1], w)
    return 0.5 * (out + out.T)


def gram_from_values(bv: BasisValues, form: str, weights, component="u", mean=None):
    """Gram matrix of ``form`` from sampled basis values.

    ``mean`` overrides the weighted mean subtracted by ``l2_centered``; it
    is needed when the nodes are only one block of a larger rule.
    """
    w = np.asarray(weights)
    vals, grads = bv.values, bv.grads
    if component == "v":
        if bv.conjugate is None:
            raise FormError("component 'v' exists only for conjugate_harmonic_pairs")
        vals, grads = bv.conjugate, bv.conjugate_grads
    if form == "l2_plain":
        return _gram_values(vals, w)
    if form == "l2_centered":
        if mean is None:
            mean = (w @ vals) / np.sum(w)
        return _gram_values(vals - mean, w)
    if form == "gradient":
        return _gram_grads(grads, w)
    if form == "weighted_gradient_d2":
        if bv.dist is None:
            raise FormError("weighted_gradient_d2 needs the boundary distance at the nodes")
        return _gram_grads(grads, w * bv.dist ** 2)
    if form == "inverse_d2":
        if bv.core is None:
            raise FormError("inverse_d2 requires the distance_weighted_polynomials family")
        return _gram_values(bv.core, w)
    raise FormError(f"unknown form {form!r}")


BLOCK = 8192


def _values_only(domain, basis, nodes, component):
    frame = _frame(domain, basis.center)
    if basis.family == "conjugate_harmonic_pairs":
        u, _, v, _ = _conjugate_pairs(nodes, basis.degree, frame)
        return u if component == "u" else v
    vals, _ = _polynomials(nodes, basis.degree, 1 if basis.family == "centered_polynomials" else 0,
                           frame)
    if basis.family == "distance_weighted_polynomials":
        vals = distance_field(domain, nodes)[0][:, None] * vals
    return vals


def assemble_forms(domain: PlanarDomain, basis: BasisSpec, quadrature: QuadratureRule, forms,
                   block: int = BLOCK):
    """Several Gram matrices in one blocked pass over the quadrature nodes.

    Args:
        forms: sequence of ``(form, component)`` or ``(form, component, scale)``
            where ``scale`` is an optional per-node factor on the weights.
        block: nodes per block.  Blocks are summed in a fixed order, so the
            result does not depend on anything but the inputs.

    Returns:
        A list of matrices in the order of ``forms``.
    """
    forms = [tuple(f) + (None,) * (3 - len(f)) for f in forms]
    for form, component, _ in forms:
        if form not in FORMS:
            raise FormError(f"unknown form {form!r}")
        if form == "inverse_d2" and basis.family != "distance_weighted_polynomials":
            raise FormError("inverse_d2 requires the distance_weighted_polynomials family")
        if component == "v" and basis.family != "conjugate_harmonic_pairs":
            raise FormError("component 'v' exists only for conjugate_harmonic_pairs")
    nodes = np.asarray(quadrature.nodes)
    w = np.asarray(quadrature.weights)
    blocks = [slice(i, min(i + block, len(w))) for i in range(0, len(w), block)]
    total = float(np.sum(w))
    means = {}
    for form, component, _ in forms:
        if form == "l2_centered" and component not in means:
            acc = 0.0
            for sl in blocks:
                acc = acc + w[sl] @ _values_only(domain, basis, nodes[sl], component)
            means[component] = acc / total
    out = [None] * len(forms)
    for sl in blocks:
        bv = evaluate_basis(domain, basis, nodes[sl])
        for i, (form, component, scale) in enumerate(forms):
            wb = w[sl] if scale is None else w[sl] * np.asarray(scale)[sl]
            g = gram_from_values(bv, form, wb, component, means.get(component))
            out[i] = g if out[i] is None else out[i] + g
    return out


def assemble_gram(domain: PlanarDomain, basis: BasisSpec, form: str,
                  quadrature: QuadratureRule, component: str = "u") -> np.ndarray:
    """Gram matrix of ``form`` on ``basis``, integrated with ``quadrature``.

    ``component`` selects the ``u`` or ``v`` half of conjugate pairs.
    """
    if form not in FORMS:
        raise FormError(f"unknown form {form!r}")
    if form == "inverse_d2" and basis.family != "distance_weighted_polynomials":
        raise FormError("inverse_d2 requires the distance_weighted_polynomials family")
    if quadrature.declared_order < 2 * basis.degree + 2:
        raise ValueError(f"quadrature order {quadrature.declared_order} is below "
                         f"2*degree+2 = {2 * basis.degree + 2}")
    return assemble_forms(domain, basis, quadrature, [(form, component)])[0]


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

_FAMILY_OF = {
    "gamma": "conjugate_harmonic_pairs",
    "poincare": "centered_polynomials",
    "hardy": "distance_weighted_polynomials",
}


def default_quadrature(domain: PlanarDomain, degree: int) -> QuadratureRule:
    """Order ``2N + 4`` with the degree-dependent refinement policy."""
    order = 2 * degree + 4
    return build_quadrature(domain, order, default_refinement(domain, degree))


def _pencil(constant: str, domain: PlanarDomain, degree: int, quadrature: QuadratureRule):
    basis = BasisSpec(_FAMILY_OF[constant], degree)
    if quadrature.declared_order < 2 * degree + 2:
        raise ValueError(f"quadrature order {quadrature.declared_order} is below "
                         f"2*degree+2 = {2 * degree + 2}")
    if constant == "gamma":
        forms = [("l2_centered", "u"), ("l2_centered", "v")]
    elif constant == "poincare":
        forms = [("l2_centered", "u"), ("weighted_gradient_d2", "u")]
    else:
        forms = [("inverse_d2", "u"), ("gradient", "u")]
    A, B = assemble_forms(domain, basis, quadrature, forms)
    return A, B


def _estimate(constant, domain, degree, quadrature):
    if constant not in CONSTANTS:
        raise ValueError(f"unknown constant {constant!r}")
    if quadrature is None:
        quadrature = default_quadrature(domain, degree)
    A, B = _pencil(constant, domain, degree, quadrature)
    lam, x = sym_generalized_eigen_max(A, B)
    return RayleighEstimate(constant, lam, degree, quadrature.declared_order,
                            ((degree, lam),), x)


def friedrichs_velte_estimate(domain: PlanarDomain, N: int,
                              quadrature: Optional[QuadratureRule] = None) -> RayleighEstimate:
    """Lower bound for the Friedrichs-Velte constant.

    Maximizes ``||u - mean(u)||^2 / ||v - mean(v)||^2`` over conjugate
    harmonic pairs built from ``w**k``, ``k = 1..N``.
    """
    return _estimate("gamma", domain, N, quadrature)


def improved_poincare_estimate(domain: PlanarDomain, N: int,
                               quadrature: Optional[QuadratureRule] = None) -> RayleighEstimate:
    """Lower bound for the improved Poincare constant, ``||u - mean(u)||^2 / ||d grad u||^2``."""
    return _estimate("poincare", domain, N, quadrature)


def hardy_estimate(domain: PlanarDomain, N: int,
                   quadrature: Optional[QuadratureRule] = None) -> RayleighEstimate:
    """Lower bound for the Hardy constant over ``u = d q``, ``deg q <= N``.

    With this family ``u**2 / d**2 = q**2``, so no singular integrand appears.
    """
    return _estimate("hardy", domain, N, quadrature)


def convergence_study(constant_name: str, domain: PlanarDomain, N_min: int, N_max: int,
                      order: Optional[int] = None,
                      refinement: Optional[int] = None) -> RayleighEstimate:
    """Run one estimator for every degree in ``N_min..N_max``.

    A single quadrature (order ``2 N_max + 4`` unless given, refinement from
    :func:`~domainconst.quadrature.default_refinement` at ``N_max``) serves
    every degree, so the discrete trial spaces are exactly nested and the
    history is monotone up to round-off.
    """
    if constant_name not in CONSTANTS:
        raise ValueError(f"unknown constant {constant_name!r}")
    if not (N_min <= N_max <= MAX_DEGREE):
        raise ValueError(f"need N_min <= N_max <= {MAX_DEGREE}")
    family = _FAMILY_OF[constant_name]
    BasisSpec(family, N_min)     # validates the lower degree
    if order is None:
        order = 2 * N_max + 4
    if refinement is None:
        refinement = default_refinement(domain, N_max)
    quad = build_quadrature(domain, order, refinement)
    A, B = _pencil(constant_name, domain, N_max, quad)
    history = []
    best = None
    for n in range(N_min, N_max + 1):
        k = basis_size(family, n)
        try:
            lam, x = sym_generalized_eigen_max(A[:k, :k], B[:k, :k])
        except DomainConstError as exc:
            partial = None
            if best is not None:
                partial = RayleighEstimate(constant_name, best[1], best[0], order,
                                           tuple(history), best[2])
            last = history[-1][0] if history else None
            raise EstimatorError(f"{constant_name} estimate failed at degree {n} "
                                 f"(last successful degree: {last}): {exc}",
                                 exc, partial, last) from exc
        history.append((n, lam))
        if best is None or lam >= best[1]:
            best = (n, lam, x)
    return RayleighEstimate(constant_name, best[1], N_max, order, tuple(history), best[2])


ESTIMATORS = {
    "gamma": friedrichs_velte_estimate,
    "poincare": improved_poincare_estimate,
    "hardy": hardy_estimate,
}
