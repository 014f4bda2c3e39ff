"""Closed-form bounds and interval propagation for the seven domain constants.

The constants are the Friedrichs-Velte constant ``gamma``, the Babuska-Aziz
constant ``c_div``, the improved Poincare constant ``poincare``, the Hardy
constant ``hardy`` and the rotation variants ``gamma_rot``, ``c_rot``,
``poincare_rot``.  :func:`propagate` narrows an interval for each of them
with every applicable inequality until nothing changes.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from scipy.special import gamma as gamma_fn

from .errors import ContradictionError, StarShapeError
from .geometry import (Disc, Ellipse, PlanarDomain, Polygon, convexity_check,
                       exterior_cone_angle, star_shape_analysis)

INF = math.inf
CONTRADICTION_TOL = 1e-9
CHANGE_TOL = 1e-12
MAX_STEPS = 10_000

CONSTANT_NAMES = ("gamma", "c_div", "poincare", "hardy", "gamma_rot", "c_rot", "poincare_rot")


# ---------------------------------------------------------------------------
# scalar bound evaluators
# ---------------------------------------------------------------------------

def omega(alpha: float, n: int) -> float:
    """Normalized spherical-cap measure for the exterior cone condition.

    ``arcsin(alpha)/pi`` in the plane, ``(1 - sqrt(1 - alpha**2))/2`` in space.
    """
    if n == 2:
        if not 0 < alpha < 1:
            raise ValueError(f"omega needs 0 < alpha < 1 for n=2, got {alpha}")
        return math.asin(alpha) / math.pi
    if n == 3:
        if not 0 < alpha <= 1:
            raise ValueError(f"omega needs 0 < alpha <= 1 for n=3, got {alpha}")
        return (1.0 - math.sqrt(1.0 - alpha * alpha)) / 2.0
    raise ValueError(f"dimension must be 2 or 3, got {n}")


def cone_hardy_bound(theta: float, n: int) -> float:
    """Upper bound ``16 / (n omega(sin(theta)/2))`` for the Hardy constant."""
    if not 0 < theta <= math.pi / 2:
        raise ValueError(f"cone semi-angle must lie in (0, pi/2], got {theta}")
    return 16.0 / (n * omega(math.sin(theta) / 2.0, n))


def star_factor(eta: float) -> float:
    """``(eta + sqrt(eta**2 - 1))**2``."""
    if not eta >= 1:
        raise ValueError(f"eccentricity must be >= 1, got {eta}")
    return (eta + math.sqrt(eta * eta - 1.0)) ** 2


def star_poincare_bound(eta: float) -> tuple[float, float]:
    """Tight and loose star-shaped bounds ``(16 f(eta), 64 eta**2)``."""
    tight = 16.0 * star_factor(eta)
    loose = 64.0 * eta * eta
    return tight, loose


def avkhadiev_hardy_bounds(M0: float, exponent_mode: str = "corrected") -> "Interval":
    """``[M0, 4 (pi M0 + Gamma(1/4)**e / (4 pi**2))**2]`` for plane domains.

    ``exponent_mode`` selects ``e = 4`` (``"corrected"``) or ``e = 1/4``
    (``"as_printed"``).
    """
    if not M0 >= 0:
        raise ValueError(f"M0 must be >= 0, got {M0}")
    if exponent_mode == "corrected":
        e = 4.0
    elif exponent_mode == "as_printed":
        e = 0.25
    else:
        raise ValueError(f"unknown exponent mode {exponent_mode!r}")
    hi = 4.0 * (math.pi * M0 + float(gamma_fn(0.25)) ** e / (4.0 * math.pi ** 2)) ** 2
    return Interval(M0, max(hi, M0) if exponent_mode == "corrected" else hi, _check=False)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: float = 0.0
    hi: float = INF
    _check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self._check:
            if not math.isfinite(lo) or lo < 0:
                raise ValueError(f"interval lower end must be finite and >= 0, got {lo}")
            if math.isnan(hi) or lo > hi:
                raise ValueError(f"invalid interval [{lo}, {hi}]")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def as_list(self):
        return [self.lo, self.hi]


@dataclass(frozen=True)
class ConstantSet:
    gamma: Interval = Interval()
    c_div: Interval = Interval()
    poincare: Interval = Interval()
    hardy: Interval = Interval()
    gamma_rot: Interval = Interval()
    c_rot: Interval = Interval()
    poincare_rot: Interval = Interval()

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_mapping(cls, mapping) -> "ConstantSet":
        """Build from ``{name: (lo, hi)}``; ``hi`` may be None or "inf"."""
        kw = {}
        for name, value in mapping.items():
            if name not in CONSTANT_NAMES:
                raise ValueError(f"unknown constant {name!r}")
            if isinstance(value, Interval):
                kw[name] = value
                continue
            lo, hi = value
            hi = INF if hi is None or hi == "inf" else float(hi)
            kw[name] = Interval(0.0 if lo is None else float(lo), hi)
        return cls(**kw)


@dataclass(frozen=True)
class DomainFacts:
    """Geometric facts gating the propagation rules.

    ``dimension`` None means nothing is known about the domain and no rule
    applies.  ``user_supplied`` lists fact names that came from an override
    file; rules using them are tagged in the trace.
    """

    dimension: Optional[int] = None
    convex: bool = False
    convex_polygon: bool = False
    simply_connected: bool = False
    eta: Optional[float] = None
    theta: Optional[float] = None
    M0: Optional[float] = None
    capacity_ratio: Optional[float] = None
    user_supplied: frozenset = frozenset()

    def __post_init__(self):
        if self.dimension not in (None, 2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")
        if self.convex_polygon and not self.convex:
            raise ValueError("convex_polygon implies convex")
        if self.eta is not None and not self.eta >= 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if self.theta is not None and not 0 < self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in (0, pi/2], got {self.theta}")
        if self.M0 is not None and not self.M0 >= 0:
            raise ValueError(f"M0 must be >= 0, got {self.M0}")
        if self.capacity_ratio is not None and not self.capacity_ratio > 0:
            raise ValueError(f"capacity ratio must be > 0, got {self.capacity_ratio}")

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension, "convex": self.convex,
            "convex_polygon": self.convex_polygon, "simply_connected": self.simply_connected,
            "eta": self.eta, "theta": self.theta, "M0": self.M0,
            "capacity_ratio": self.capacity_ratio, "user_supplied": sorted(self.user_supplied),
        }


@dataclass(frozen=True)
class TraceStep:
    rule: str
    constant: str
    old: Interval
    new: Interval


# ---------------------------------------------------------------------------
# facts
# ---------------------------------------------------------------------------

OVERRIDE_KEYS = ("M0", "capacity_ratio", "convex", "simply_connected", "eta", "theta",
                 "dimension")


def facts_from_geometry(domain: PlanarDomain) -> DomainFacts:
    """Auto-derived facts: planar, hole-free, convexity, eccentricity, cone angle."""
    if isinstance(domain, Polygon):
        convex = convexity_check(domain)
        try:
            eta = star_shape_analysis(domain).eccentricity
        except StarShapeError:
            eta = None
        return DomainFacts(dimension=2, convex=convex, convex_polygon=convex,
                           simply_connected=True, eta=eta, theta=exterior_cone_angle(domain))
    if isinstance(domain, Disc):
        eta = 1.0
    elif isinstance(domain, Ellipse):
        eta = domain.a / domain.b
    else:
        raise TypeError(f"unsupported domain {type(domain).__name__}")
    return DomainFacts(dimension=2, convex=True, convex_polygon=False, simply_connected=True,
                       eta=eta, theta=math.pi / 2)


def merge_overrides(facts: DomainFacts, overrides: dict) -> DomainFacts:
    """Merge a facts-override mapping over ``facts``; user values win.

    Facts with no known dimension are taken as planar unless the mapping
    carries a ``dimension`` key.
    """
    if not isinstance(overrides, dict):
        raise ValueError("facts override must be a JSON object")
    kw = {}
    for key, value in overrides.items():
        if key not in OVERRIDE_KEYS:
            raise ValueError(f"unknown facts override key {key!r}")
        if key in ("convex", "simply_connected") and not isinstance(value, bool):
            raise ValueError(f"facts override {key!r} must be a boolean")
        if key not in ("convex", "simply_connected", "dimension"):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"facts override {key!r} must be a number")
            value = float(value)
        kw[key] = value
    if kw.get("convex") is False:
        kw["convex_polygon"] = False
    if facts.dimension is None:
        kw.setdefault("dimension", 2)
    user = facts.user_supplied | frozenset(k for k in kw if k != "convex_polygon")
    return replace(facts, user_supplied=user, **kw)


# ---------------------------------------------------------------------------
# rules
# ---------------------------------------------------------------------------

R_BA = "C_Ω = 1 + Γ_Ω"
R_BA_ROT = "C̃_Ω = 1 + Γ̃_Ω"
R_IP_FV = "Γ_Ω ≤ 4P_Ω"
R_FV_IP = "P_Ω ≤ H_Ω(1+Γ_Ω)"
R_FVT_IPROT = "P̃_Ω ≤ H_Ω(1+Γ̃_Ω)"
R_IPROT_FVT = "Γ̃_Ω ≤ 4P̃_Ω"
R_POLYGON = "Γ_Ω ≤ P_Ω (convex polygon)"
R_CONVEX_H = "H_Ω = 4 (convex)"
R_SIMPLY_H = "H_Ω ≤ 16 (simply connected planar)"
R_PLANAR = "Γ̃_Ω = Γ_Ω and P̃_Ω = P_Ω (planar)"
R_STAR = "P_Ω ≤ 16(η+√(η²−1))²"
R_STAR_GAMMA = "Γ_Ω ≤ (η+√(η²−1))²"
R_CONE = "H_Ω ≤ 16/(n ω(sin θ/2))"
R_AVKHADIEV = "M₀ ≤ H_Ω ≤ 4(πM₀ + Γ(¼)^e/(4π²))²"
R_MAZYA = "c ≤ H_Ω ≤ 16c"


def _mul(a, b):
    # 0 * inf is taken as 0 only when a bound is genuinely zero
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def _rules(facts: DomainFacts, cited_star_gamma: bool, avkhadiev_mode: str):
    """Rules as ``(name, function, constants)``; functions map the state to proposals.

    A proposal is ``(constant, side, value)`` meaning ``lo >= value`` for
    side ``"lo"`` and ``hi <= value`` for side ``"hi"``.
    """
    if facts.dimension is None:
        return []
    user = facts.user_supplied

    def tag(name, *keys):
        used = [k for k in keys if k in user]
        return name + (" [user: " + ", ".join(used) + "]" if used else "")

    def identity(c, g):
        def f(s):
            out = [(c, "lo", 1.0 + s[g][0]), (g, "lo", s[c][0] - 1.0)]
            if s[g][1] < INF:
                out.append((c, "hi", 1.0 + s[g][1]))
            if s[c][1] < INF:
                out.append((g, "hi", s[c][1] - 1.0))
            return out
        return f

    def four_p(g, p):
        def f(s):
            out = [(p, "lo", s[g][0] / 4.0)]
            if s[p][1] < INF:
                out.append((g, "hi", 4.0 * s[p][1]))
            return out
        return f

    def p_le_h1g(p, g):
        def f(s):
            out = []
            hhi, ghi, plo = s["hardy"][1], s[g][1], s[p][0]
            if hhi < INF and ghi < INF:
                out.append((p, "hi", hhi * (1.0 + ghi)))
            if ghi < INF and plo > 0:
                out.append(("hardy", "lo", plo / (1.0 + ghi)))
            if 0 < hhi < INF and plo > 0:
                out.append((g, "lo", plo / hhi - 1.0))
            return out
        return f

    rules = [
        (R_BA, identity("c_div", "gamma"), ("c_div", "gamma")),
        (R_BA_ROT, identity("c_rot", "gamma_rot"), ("c_rot", "gamma_rot")),
        (R_IP_FV, four_p("gamma", "poincare"), ("gamma", "poincare")),
        (R_FV_IP, p_le_h1g("poincare", "gamma"), ("poincare", "hardy", "gamma")),
        (R_IPROT_FVT, four_p("gamma_rot", "poincare_rot"), ("gamma_rot", "poincare_rot")),
        (R_FVT_IPROT, p_le_h1g("poincare_rot", "gamma_rot"),
         ("poincare_rot", "hardy", "gamma_rot")),
    ]
    planar = facts.dimension == 2
    if planar and facts.convex_polygon:
        def polygon(s):
            out = [("poincare", "lo", s["gamma"][0])]
            if s["poincare"][1] < INF:
                out.append(("gamma", "hi", s["poincare"][1]))
            return out
        rules.append((tag(R_POLYGON, "convex"), polygon, ("gamma", "poincare")))
    if facts.convex:
        rules.append((tag(R_CONVEX_H, "convex"),
                      lambda s: [("hardy", "lo", 4.0), ("hardy", "hi", 4.0)], ("hardy",)))
    if planar and facts.simply_connected:
        rules.append((tag(R_SIMPLY_H, "simply_connected"), lambda s: [("hardy", "hi", 16.0)],
                      ("hardy",)))
    if planar:
        def same(s):
            out = []
            for a, b in (("gamma", "gamma_rot"), ("poincare", "poincare_rot")):
                out += [(a, "lo", s[b][0]), (b, "lo", s[a][0]),
                        (a, "hi", s[b][1]), (b, "hi", s[a][1])]
            return out
        rules.append((R_PLANAR, same, ("gamma", "gamma_rot", "poincare", "poincare_rot")))
    if planar and facts.eta is not None:
        factor = star_factor(facts.eta)
        tight = 16.0 * factor
        rules.append((tag(R_STAR, "eta"), lambda s: [("poincare", "hi", tight)],
                      ("poincare",)))
        if cited_star_gamma:
            rules.append((tag(R_STAR_GAMMA, "eta"), lambda s: [("gamma", "hi", factor)],
                          ("gamma",)))
    if facts.theta is not None:
        cone = cone_hardy_bound(facts.theta, facts.dimension)
        rules.append((tag(R_CONE, "theta"), lambda s: [("hardy", "hi", cone)], ("hardy",)))
    if planar and facts.M0 is not None:
        avk = avkhadiev_hardy_bounds(facts.M0, avkhadiev_mode)
        rules.append((tag(R_AVKHADIEV, "M0"),
                      lambda s: [("hardy", "lo", avk.lo), ("hardy", "hi", avk.hi)], ("hardy",)))
    if facts.capacity_ratio is not None:
        c = facts.capacity_ratio
        rules.append((tag(R_MAZYA, "capacity_ratio"),
                      lambda s: [("hardy", "lo", c), ("hardy", "hi", 16.0 * c)], ("hardy",)))
    return rules


def _improves(side, old, new):
    if side == "lo":
        if not new > old:
            return False
        return new - old > CHANGE_TOL * max(1.0, abs(old))
    if not new < old:
        return False
    if old == INF:
        return True
    return old - new > CHANGE_TOL * max(1.0, abs(old))


def propagate(facts: DomainFacts, seed: ConstantSet, *,
              use_cited_star_gamma_bound: bool = True,
              avkhadiev_mode: str = "corrected",
              rule_order=None, rng: Optional[random.Random] = None):
    """Narrow every interval in ``seed`` to a fixpoint of the applicable rules.

    Args:
        rule_order: optional permutation of rule indices to apply per pass.
        rng: when given, the rule order is reshuffled on every pass.

    Returns:
        ``(ConstantSet, trace)`` where ``trace`` is a list of
        :class:`TraceStep`, one per narrowing.

    Raises:
        ContradictionError: when a narrowing empties an interval by more than
            ``1e-9``.  Smaller overshoots collapse the interval to a point.
    """
    state = {name: [iv.lo, iv.hi] for name, iv in seed.as_dict().items()}
    rules = _rules(facts, use_cited_star_gamma_bound, avkhadiev_mode)
    order = list(range(len(rules))) if rule_order is None else list(rule_order)
    trace = []
    steps = 0

    def apply(rule_name, involved, const, side, value):
        nonlocal steps
        lo, hi = state[const]
        old_val = lo if side == "lo" else hi
        if not _improves(side, old_val, value):
            return False
        if side == "lo":
            if value > hi + CONTRADICTION_TOL:
                raise ContradictionError(rule_name, _names(const, involved),
                                         f"{const} lower bound {value:.12g} exceeds upper bound {hi:.12g}")
            new = [min(value, hi), hi]
        else:
            if value < lo - CONTRADICTION_TOL:
                raise ContradictionError(rule_name, _names(const, involved),
                                         f"{const} upper bound {value:.12g} is below lower bound {lo:.12g}")
            new = [lo, max(value, lo)]
        if new == [lo, hi]:
            return False
        state[const] = new
        trace.append(TraceStep(rule_name, const, Interval(lo, hi, _check=False),
                               Interval(*new, _check=False)))
        steps += 1
        return True

    changed = True
    while changed and steps < MAX_STEPS:
        changed = False
        if rng is not None:
            rng.shuffle(order)
        for idx in order:
            name, fn, involved = rules[idx]
            for const, side, value in fn(state):
                if apply(name, involved, const, side, value):
                    changed = True
                    if steps >= MAX_STEPS:
                        break

    if facts.dimension is not None:
        if facts.dimension == 2:
            for a, b in (("gamma", "gamma_rot"), ("poincare", "poincare_rot")):
                _assign(state, b, list(state[a]), R_PLANAR, trace)
        _assign(state, "c_div", [1.0 + state["gamma"][0], 1.0 + state["gamma"][1]], R_BA, trace)
        _assign(state, "c_rot", [1.0 + state["gamma_rot"][0], 1.0 + state["gamma_rot"][1]],
                R_BA_ROT, trace)

    result = ConstantSet(**{k: Interval(*v, _check=False) for k, v in state.items()})
    return result, trace


def _names(const, involved):
    return [const] + [c for c in involved if c != const]


def _assign(state, const, new, rule_name, trace):
    """Exact assignment for identities (``c_div = 1 + gamma`` and the planar equalities)."""
    lo, hi = state[const]
    if new == [lo, hi]:
        return
    if new[0] > new[1] + CONTRADICTION_TOL:
        raise ContradictionError(rule_name, [const], "identity produced an empty interval")
    state[const] = new
    trace.append(TraceStep(rule_name, const, Interval(lo, hi, _check=False),
                           Interval(*new, _check=False)))


def format_interval(iv: Interval) -> str:
    return f"[{iv.lo:.12g}, {iv.hi:.12g}]"
