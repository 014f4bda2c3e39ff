import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from domainconst import bounds as B
from domainconst.bounds import (CONSTANT_NAMES, ConstantSet, DomainFacts, Interval,
                                avkhadiev_hardy_bounds, cone_hardy_bound, facts_from_geometry,
                                format_interval, merge_overrides, omega, propagate,
                                star_factor, star_poincare_bound)
from domainconst.errors import ContradictionError
from domainconst.geometry import Disc, Ellipse, l_shape, regular_polygon, unit_square

# mpmath values from tests/oracles.py
OMEGA_03_2 = 0.0969866840206783
CONE_PI2_3 = 79.6170838948027
CONE_PI4_2 = 69.5490529326811
AVK_0_CORR = 76.6282871918817
AVK_0_PRINT = 0.00488687303018437
AVK_1_CORR = 226.109677884565
L_SHAPE_ETA = math.sqrt(10)

CONVEX_DISC = DomainFacts(dimension=2, convex=True, simply_connected=True, eta=1.0,
                          theta=math.pi / 2)


def test_omega():
    assert omega(0.5, 2) == pytest.approx(1 / 6, abs=1e-15)
    assert omega(1.0, 3) == 0.5
    assert omega(0.3, 2) == pytest.approx(OMEGA_03_2, rel=1e-14)
    for bad in ((0.0, 2), (1.0, 2), (1.2, 3), (0.5, 4)):
        with pytest.raises(ValueError):
            omega(*bad)


def test_cone_bound():
    assert cone_hardy_bound(math.pi / 2, 2) == pytest.approx(48.0, abs=1e-12)
    assert cone_hardy_bound(math.pi / 2, 3) == pytest.approx(CONE_PI2_3, rel=1e-13)
    assert cone_hardy_bound(math.pi / 4, 2) == pytest.approx(CONE_PI4_2, rel=1e-13)
    assert cone_hardy_bound(math.pi / 4, 2) == pytest.approx(
        8 * math.pi / math.asin(math.sqrt(2) / 4), rel=1e-14)
    with pytest.raises(ValueError):
        cone_hardy_bound(0.0, 2)
    with pytest.raises(ValueError):
        cone_hardy_bound(2.0, 2)


def test_star_bound_examples():
    assert star_poincare_bound(1.0) == (16.0, 64.0)
    tight, loose = star_poincare_bound(math.sqrt(2))
    assert tight == pytest.approx(16 * (math.sqrt(2) + 1) ** 2)
    assert loose == pytest.approx(128.0)
    assert star_poincare_bound(2.0)[0] == pytest.approx(222.851, abs=1e-3)
    with pytest.raises(ValueError):
        star_poincare_bound(0.99)


@given(st.floats(1.0, 1e6))
def test_star_tight_below_loose(eta):
    tight, loose = star_poincare_bound(eta)
    assert tight <= loose * (1 + 1e-15)
    assert star_factor(eta) >= 1.0


def test_avkhadiev():
    iv = avkhadiev_hardy_bounds(0.0)
    assert iv.lo == 0.0 and iv.hi == pytest.approx(AVK_0_CORR, rel=1e-13)
    assert avkhadiev_hardy_bounds(0.0, "as_printed").hi == pytest.approx(AVK_0_PRINT, rel=1e-12)
    iv = avkhadiev_hardy_bounds(1.0)
    assert iv.lo == 1.0 and iv.hi == pytest.approx(AVK_1_CORR, rel=1e-13)
    with pytest.raises(ValueError):
        avkhadiev_hardy_bounds(-1.0)
    with pytest.raises(ValueError):
        avkhadiev_hardy_bounds(1.0, "doubled")


def test_interval_validation():
    assert Interval().as_list() == [0.0, math.inf]
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(-1.0, 1.0)
    assert format_interval(Interval(0.25, 8)) == "[0.25, 8]"
    cs = ConstantSet.from_mapping({"gamma": (1, None), "hardy": (0, "inf")})
    assert cs.gamma == Interval(1.0, math.inf)
    with pytest.raises(ValueError):
        ConstantSet.from_mapping({"stokes": (0, 1)})


def test_facts_from_geometry():
    sq = facts_from_geometry(unit_square())
    assert (sq.dimension, sq.convex, sq.convex_polygon, sq.simply_connected) == (2, True, True, True)
    assert sq.eta == pytest.approx(math.sqrt(2), abs=1e-6)
    assert sq.theta == pytest.approx(math.pi / 2)
    disc = facts_from_geometry(Disc((0, 0), 1.0))
    assert disc.convex and not disc.convex_polygon and disc.eta == 1.0
    assert disc.M0 is None and disc.capacity_ratio is None
    ls = facts_from_geometry(l_shape())
    assert not ls.convex and ls.simply_connected
    assert ls.eta == pytest.approx(L_SHAPE_ETA, rel=1e-4)
    assert ls.theta == pytest.approx(math.pi / 4)
    assert facts_from_geometry(Ellipse((0, 0), 3.0, 1.0)).eta == 3.0


def test_hand_fixpoint():
    out, trace = propagate(CONVEX_DISC, ConstantSet.from_mapping({"gamma": (1, 1)}))
    assert out.hardy == Interval(4, 4)
    assert out.poincare == Interval(0.25, 8)
    assert out.c_div == Interval(2, 2)
    assert out.gamma_rot == Interval(1, 1)
    assert out.poincare_rot == out.poincare
    assert out.c_rot == Interval(2, 2)
    assert trace and all(isinstance(s.rule, str) for s in trace)
    assert any(s.rule == B.R_CONVEX_H for s in trace)


def test_no_facts_no_narrowing():
    seed = ConstantSet()
    out, trace = propagate(DomainFacts(), seed)
    assert out == seed and trace == []


def test_contradiction_names_rule():
    seed = ConstantSet.from_mapping({"poincare": (0, 1), "gamma": (8, None)})
    with pytest.raises(ContradictionError) as err:
        propagate(DomainFacts(dimension=2, convex=True), seed)
    assert err.value.rule == B.R_IP_FV
    assert set(err.value.constants) == {"gamma", "poincare"}
    assert "Γ_Ω ≤ 4P_Ω" in str(err.value)


def test_small_overshoot_clamps():
    seed = ConstantSet.from_mapping({"poincare": (0, 1), "gamma": (4 + 1e-10, None)})
    out, _ = propagate(DomainFacts(dimension=2), seed)
    assert out.gamma.lo == out.gamma.hi == pytest.approx(4.0, abs=1e-9)
    assert out.poincare == Interval(1, 1)


def test_disc_witness_soundness():
    out, _ = propagate(CONVEX_DISC, ConstantSet.from_mapping({"gamma": (1, 1)}))
    assert out.poincare.contains(1.5)
    assert out.hardy.lo <= 4 and 1.0 <= out.hardy.hi


def test_star_gamma_flag():
    facts = DomainFacts(dimension=2, eta=2.0)
    on, _ = propagate(facts, ConstantSet())
    off, trace = propagate(facts, ConstantSet(), use_cited_star_gamma_bound=False)
    assert on.gamma.hi == pytest.approx(star_factor(2.0))
    assert off.gamma.hi == pytest.approx(4 * 16 * star_factor(2.0))
    assert all(s.rule != B.R_STAR_GAMMA for s in trace)


def test_inverse_directions():
    facts = DomainFacts(dimension=2)
    seed = ConstantSet.from_mapping({"poincare": (6, None), "gamma": (0, 2), "hardy": (0, 3)})
    out, _ = propagate(facts, seed)
    assert out.hardy.lo == pytest.approx(2.0)        # P.lo / (1 + Γ.hi)
    assert out.gamma.lo == pytest.approx(1.0)        # P.lo / H.hi - 1
    assert out.poincare.hi == pytest.approx(9.0)     # H.hi (1 + Γ.hi)


def test_mazya_and_avkhadiev_rules():
    facts = merge_overrides(facts_from_geometry(l_shape()), {"capacity_ratio": 0.5, "M0": 0.0})
    out, trace = propagate(facts, ConstantSet())
    assert out.hardy.lo == 0.5
    assert out.hardy.hi == 8.0
    assert any(s.rule.startswith(B.R_MAZYA) and "[user: capacity_ratio]" in s.rule for s in trace)


def test_merge_overrides():
    base = facts_from_geometry(unit_square())
    f = merge_overrides(base, {"convex": False, "M0": 2})
    assert not f.convex and not f.convex_polygon and f.M0 == 2.0
    assert f.user_supplied == {"convex", "M0"}
    assert merge_overrides(DomainFacts(), {"M0": 1.0}).dimension == 2
    for bad in ({"M0": "x"}, {"convex": 1}, {"colour": 1}, {"M0": True}):
        with pytest.raises(ValueError):
            merge_overrides(base, bad)
    with pytest.raises(ValueError):
        merge_overrides(base, {"eta": 0.5})
    with pytest.raises(ValueError):
        merge_overrides(base, [1])


def test_avkhadiev_mode_as_printed_contradicts_convexity():
    facts = merge_overrides(facts_from_geometry(unit_square()), {"M0": 0.0})
    propagate(facts, ConstantSet())
    with pytest.raises(ContradictionError):
        propagate(facts, ConstantSet(), avkhadiev_mode="as_printed")


# --- property tests -------------------------------------------------------

@st.composite
def facts_strategy(draw):
    dim = draw(st.sampled_from([None, 2, 3]))
    convex = draw(st.booleans())
    return DomainFacts(
        dimension=dim, convex=convex, convex_polygon=convex and draw(st.booleans()),
        simply_connected=draw(st.booleans()),
        eta=draw(st.none() | st.floats(1.0, 20.0)),
        theta=draw(st.none() | st.floats(0.05, math.pi / 2)),
        M0=draw(st.none() | st.floats(0.0, 3.0)),
        capacity_ratio=draw(st.none() | st.floats(0.01, 4.0)))


def random_seed_set(rng):
    kw = {}
    for name in CONSTANT_NAMES:
        r = rng.random()
        if r < 0.4:
            kw[name] = (0.0, None)
        elif r < 0.7:
            kw[name] = (rng.uniform(0, 3), None)
        else:
            lo = rng.uniform(0, 2)
            kw[name] = (lo, lo + rng.uniform(0, 500))
    return ConstantSet.from_mapping(kw)


def _run(facts, seed, **kw):
    try:
        return propagate(facts, seed, **kw)[0]
    except ContradictionError:
        return None


def _close(a, b, tol=1e-12):
    for name in CONSTANT_NAMES:
        for x, y in zip(getattr(a, name).as_list(), getattr(b, name).as_list()):
            if x == y:
                continue
            if abs(x - y) > tol * max(1.0, abs(x)):
                return False
    return True


@settings(max_examples=150, deadline=None)
@given(facts_strategy(), st.integers(0, 2 ** 32 - 1))
def test_idempotent(facts, s):
    out = _run(facts, random_seed_set(random.Random(s)))
    if out is None:
        return
    again, trace = propagate(facts, out)
    assert again == out
    assert trace == []


@settings(max_examples=150, deadline=None)
@given(facts_strategy(), st.integers(0, 2 ** 32 - 1))
def test_confluent(facts, s):
    seed = random_seed_set(random.Random(s))
    ref = _run(facts, seed)
    for k in range(3):
        other = _run(facts, seed, rng=random.Random(s + k))
        assert (ref is None) == (other is None)
        if ref is not None:
            assert _close(ref, other)


@settings(max_examples=150, deadline=None)
@given(facts_strategy(), st.integers(0, 2 ** 32 - 1), st.sampled_from(CONSTANT_NAMES),
       st.floats(0.0, 1.0))
def test_monotone(facts, s, name, frac):
    seed = random_seed_set(random.Random(s))
    wide = _run(facts, seed)
    iv = getattr(seed, name)
    hi = iv.hi if math.isfinite(iv.hi) else iv.lo + 100.0
    narrower = seed.from_mapping({**{k: v.as_list() for k, v in seed.as_dict().items()},
                                  name: (iv.lo + frac * (hi - iv.lo), hi)})
    narrow = _run(facts, narrower)
    if wide is None:
        assert narrow is None
        return
    if narrow is None:
        return
    for c in CONSTANT_NAMES:
        w, n = getattr(wide, c), getattr(narrow, c)
        assert n.lo >= w.lo - 1e-12 * max(1.0, w.lo)
        assert n.hi <= w.hi + 1e-12 * max(1.0, w.hi)


@settings(max_examples=100, deadline=None)
@given(facts_strategy(), st.integers(0, 2 ** 32 - 1))
def test_planar_rotation_equalities(facts, s):
    if facts.dimension != 2:
        return
    out = _run(facts, random_seed_set(random.Random(s)))
    if out is None:
        return
    assert out.gamma_rot == out.gamma
    assert out.poincare_rot == out.poincare
    assert out.c_div.lo == 1.0 + out.gamma.lo and out.c_div.hi == 1.0 + out.gamma.hi
