"""End-to-end verification over a catalog of domains.

Each catalog entry runs geometry, the three estimators and interval
propagation, and checks that every numerical lower bound sits inside the
propagated interval of its constant.  Results are collected into a
:class:`VerificationReport` that can be written as CSV or JSON.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .bounds import (CONSTANT_NAMES, ConstantSet, DomainFacts, Interval, facts_from_geometry,
                     merge_overrides, omega, propagate)
from .eigen import sym_generalized_eigen_max
from .errors import ContradictionError, DomainConstError
from .geometry import (Disc, PlanarDomain, Polygon, bounding_box, contains, distance_field,
                       domain_from_dict, domain_to_dict, l_shape, mean_distance_field,
                       rectangle, regular_polygon, unit_square)
from .quadrature import build_quadrature, default_refinement
from .spectral import (CONSTANTS, MAX_DEGREE, BasisSpec, EstimatorError, assemble_forms,
                       convergence_study)

CSV_HEADER = ("domain", "constant", "estimate", "interval_lo", "interval_hi", "margin", "status")
DEFAULT_DEGREES = {"gamma": (1, 8), "poincare": (1, 8), "hardy": (0, 8)}
_MIN_DEGREE = {"gamma": 1, "poincare": 1, "hardy": 0}
THREADS_ENV = "DOMAINCONST_THREADS"


class CatalogError(DomainConstError, ValueError):
    """Malformed catalog file or entry."""


class ReportIOError(DomainConstError, OSError):
    """A report could not be written."""

    def __init__(self, path, cause):
        super().__init__(f"cannot write report to {path}: {cause}")
        self.path = str(path)


@dataclass(frozen=True)
class Tolerances:
    consistency: float = 1e-6
    monotonicity: float = 1e-9

    def __post_init__(self):
        if not (self.consistency > 0 and self.monotonicity > 0):
            raise CatalogError("tolerances must be positive")


@dataclass(frozen=True)
class CatalogEntry:
    """One domain with its estimator degree ranges and optional overrides.

    ``overrides`` may hold facts-override keys plus a ``"seed"`` mapping of
    constant names to ``[lo, hi]`` intervals that are intersected with the
    numerical lower bounds before propagation.
    """

    name: str
    domain: PlanarDomain
    overrides: Optional[dict] = None
    degrees: dict = field(default_factory=lambda: dict(DEFAULT_DEGREES))
    tolerances: Tolerances = Tolerances()

    def __post_init__(self):
        for const, (lo, hi) in self.degrees.items():
            if const not in CONSTANTS:
                raise CatalogError(f"entry {self.name!r}: unknown constant {const!r} in degrees")
            if not (_MIN_DEGREE[const] <= lo <= hi <= MAX_DEGREE):
                raise CatalogError(f"entry {self.name!r}: degree range {lo}..{hi} for {const} "
                                   f"outside {_MIN_DEGREE[const]}..{MAX_DEGREE}")

    def to_dict(self) -> dict:
        out = {"name": self.name, "domain": domain_to_dict(self.domain),
               "degrees": {k: list(v) for k, v in sorted(self.degrees.items())},
               "tolerances": {"consistency": self.tolerances.consistency,
                              "monotonicity": self.tolerances.monotonicity}}
        if self.overrides:
            out["overrides"] = self.overrides
        return out


@dataclass
class ReportRow:
    domain: str
    constant: str
    estimate: float
    interval_lo: float
    interval_hi: float
    margin: float
    status: str
    detail: str = ""


@dataclass
class CheckResult:
    name: str
    domain: str
    passed: bool
    detail: str = ""


@dataclass
class EntryResult:
    """Everything computed for one catalog entry."""

    name: str
    rows: list
    checks: list
    facts: Optional[DomainFacts] = None
    intervals: Optional[ConstantSet] = None
    estimates: dict = field(default_factory=dict)
    histories: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)


@dataclass
class VerificationReport:
    rows: list
    checks: list
    global_status: str
    provenance: dict
    entries: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "global_status": self.global_status,
            "provenance": self.provenance,
            "rows": [{"domain": r.domain, "constant": r.constant, "estimate": _num(r.estimate),
                      "interval_lo": _num(r.interval_lo), "interval_hi": _num(r.interval_hi),
                      "margin": _num(r.margin), "status": r.status, "detail": r.detail}
                     for r in self.rows],
            "checks": [{"name": c.name, "domain": c.domain,
                        "status": "pass" if c.passed else "fail", "detail": c.detail}
                       for c in self.checks],
        }


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def default_catalog() -> list:
    """Disc, unit square, 3:1 rectangle, regular hexagon, right triangle, L-shape."""
    return [
        CatalogEntry("disc", Disc((0.0, 0.0), 1.0)),
        CatalogEntry("unit_square", unit_square()),
        CatalogEntry("rectangle_3x1", rectangle(3.0, 1.0)),
        CatalogEntry("hexagon", regular_polygon(6)),
        CatalogEntry("right_triangle", Polygon([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])),
        CatalogEntry("l_shape", l_shape()),
    ]


def entry_from_dict(obj, base_dir=None) -> CatalogEntry:
    if not isinstance(obj, dict):
        raise CatalogError("catalog entries must be JSON objects")
    unknown = set(obj) - {"name", "domain", "overrides", "degrees", "tolerances"}
    if unknown:
        raise CatalogError(f"unknown catalog entry keys: {sorted(unknown)}")
    if not isinstance(obj.get("name"), str) or "domain" not in obj:
        raise CatalogError("catalog entry needs a string 'name' and a 'domain'")
    domain = domain_from_dict(obj["domain"])
    overrides = obj.get("overrides")
    if isinstance(overrides, str):
        path = Path(overrides)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        try:
            overrides = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CatalogError(f"cannot read overrides file {path}: {exc}") from None
    if overrides is not None and not isinstance(overrides, dict):
        raise CatalogError("overrides must be an object or a path to a JSON file")
    degrees = dict(DEFAULT_DEGREES)
    for const, rng in (obj.get("degrees") or {}).items():
        try:
            lo, hi = int(rng[0]), int(rng[1])
        except (TypeError, ValueError, IndexError, KeyError):
            raise CatalogError(f"degree range for {const!r} must be [N_min, N_max]") from None
        degrees[const] = (lo, hi)
    tol = obj.get("tolerances") or {}
    try:
        tolerances = Tolerances(**{k: float(v) for k, v in tol.items()})
    except TypeError as exc:
        raise CatalogError(f"bad tolerances: {exc}") from None
    return CatalogEntry(obj["name"], domain, overrides, degrees, tolerances)


def load_catalog(path) -> list:
    """Read a JSON array of catalog entries."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path} is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise CatalogError("catalog must be a JSON array")
    return [entry_from_dict(e, path.parent) for e in data]


def _split_overrides(overrides):
    if not overrides:
        return {}, ConstantSet()
    facts = {k: v for k, v in overrides.items() if k != "seed"}
    seed = overrides.get("seed") or {}
    if not isinstance(seed, dict):
        raise CatalogError("overrides 'seed' must be an object")
    return facts, ConstantSet.from_mapping(seed)


# ---------------------------------------------------------------------------
# entry pipeline
# ---------------------------------------------------------------------------

def _seed_with_estimates(seed: ConstantSet, estimates: dict) -> ConstantSet:
    """Raise seed lower ends to the estimates where that keeps them valid.

    An estimate above a seeded upper end is left out of the seed; the
    containment check then reports it.
    """
    kw = {}
    for name, iv in seed.as_dict().items():
        est = estimates.get(name)
        if est is not None and est > iv.lo and est <= iv.hi:
            iv = Interval(est, iv.hi)
        kw[name] = iv
    return ConstantSet(**kw)


def run_entry(entry: CatalogEntry, with_intervals: bool = False):
    """Run estimators and propagation for one entry.

    Returns the report rows, or the full :class:`EntryResult` when
    ``with_intervals`` is set.  Module errors never escape: they turn the
    affected rows into failures carrying the error message.
    """
    res = EntryResult(entry.name, [], [])
    tol = entry.tolerances
    errors = {}
    try:
        fact_over, seed = _split_overrides(entry.overrides)
        facts = facts_from_geometry(entry.domain)
        if fact_over:
            facts = merge_overrides(facts, fact_over)
        res.facts = facts
    except (DomainConstError, ValueError, TypeError) as exc:
        for const in ("gamma", "c_div", "poincare", "hardy"):
            res.rows.append(ReportRow(entry.name, const, math.nan, math.nan, math.nan,
                                      math.nan, "fail", f"facts: {exc}"))
        return res if with_intervals else res.rows

    for const in CONSTANTS:
        lo, hi = entry.degrees.get(const, DEFAULT_DEGREES[const])
        try:
            est = convergence_study(const, entry.domain, lo, hi)
        except EstimatorError as exc:
            errors[const] = str(exc)
            if exc.partial is not None:
                res.estimates[const] = exc.partial.value
                res.histories[const] = list(exc.partial.history)
            continue
        except (DomainConstError, ValueError, ArithmeticError) as exc:
            errors[const] = f"{type(exc).__name__}: {exc}"
            continue
        res.estimates[const] = est.value
        res.histories[const] = list(est.history)
        vals = [v for _, v in est.history]
        drops = [i for i in range(1, len(vals)) if vals[i] < vals[i - 1] - tol.monotonicity]
        res.checks.append(CheckResult(
            f"monotone_history:{const}", entry.name, not drops,
            "" if not drops else f"history decreases at degree {est.history[drops[0]][0]}"))

    if "gamma" in res.estimates:
        res.estimates["c_div"] = 1.0 + res.estimates["gamma"]
    try:
        intervals, trace = propagate(facts, _seed_with_estimates(seed, res.estimates))
    except ContradictionError as exc:
        for const in ("gamma", "c_div", "poincare", "hardy"):
            res.rows.append(ReportRow(entry.name, const, res.estimates.get(const, math.nan),
                                      math.nan, math.nan, math.nan, "fail", str(exc)))
        return res if with_intervals else res.rows
    res.intervals, res.trace = intervals, trace

    identity = (intervals.c_div.lo == 1.0 + intervals.gamma.lo
                and intervals.c_div.hi == 1.0 + intervals.gamma.hi)
    res.checks.append(CheckResult("c_div_identity", entry.name, identity,
                                  "" if identity else "c_div interval differs from 1 + gamma"))
    for const in ("gamma", "c_div", "poincare", "hardy"):
        iv = getattr(intervals, const)
        est = res.estimates.get(const, math.nan)
        margin = iv.hi - est
        detail = errors.get("gamma" if const == "c_div" else const, "")
        ok = not detail and est <= iv.hi + tol.consistency
        if const == "c_div":
            ok = ok and identity
        if not ok and not detail:
            detail = (f"estimate {est:.12g} exceeds upper bound {iv.hi:.12g}"
                      if const != "c_div" or identity else "c_div interval differs from 1 + gamma")
        res.rows.append(ReportRow(entry.name, const, est, iv.lo, iv.hi, margin,
                                  "pass" if ok else "fail", detail))
    return res if with_intervals else res.rows


# ---------------------------------------------------------------------------
# property checks
# ---------------------------------------------------------------------------

def sample_points(domain: PlanarDomain, n: int = 200) -> np.ndarray:
    """First ``n`` points of the unscrambled Halton sequence inside ``domain``.

    Points are mapped into the bounding box and rejected when outside the
    domain or within ``1e-9`` of the boundary.
    """
    x0, y0, x1, y1 = bounding_box(domain)
    sampler = qmc.Halton(d=2, scramble=False)
    sampler.fast_forward(1)     # skip the corner point
    out = []
    for _ in range(200):
        u = sampler.random(4 * n)
        pts = np.column_stack([x0 + (x1 - x0) * u[:, 0], y0 + (y1 - y0) * u[:, 1]])
        inside = contains(domain, pts)
        pts = pts[inside]
        if len(pts):
            d = distance_field(domain, pts)[0]
            pts = pts[d > 1e-9]
        out.extend(pts)
        if len(out) >= n:
            return np.array(out[:n])
    raise DomainConstError(f"could not sample {n} interior points")


def davies_quotient(domain: PlanarDomain, degree: int = 3, M: int = 256) -> float:
    """Largest ``int u^2/D^2 / int |grad u|^2`` over ``u = d q``, ``deg q <= degree``."""
    quad = build_quadrature(domain, 2 * degree + 4, default_refinement(domain, degree))
    d = distance_field(domain, quad.nodes)[0]
    D = mean_distance_field(domain, quad.nodes, M=M)
    basis = BasisSpec("distance_weighted_polynomials", degree)
    A, B = assemble_forms(domain, basis, quad, [("inverse_d2", "u", (d / D) ** 2),
                                                ("gradient", "u")])
    return sym_generalized_eigen_max(A, B)[0]


def run_property_checks(entry: CatalogEntry, n_points: int = 200, M: int = 256,
                        tol: float = 1e-6, facts: Optional[DomainFacts] = None) -> list:
    """Mean-distance checks at quasi-random interior points.

    Checks ``d <= D``, ``D <= 2 d omega(sin(theta)/2)**(-1/2)`` when a cone
    angle is known, and the mean-distance Hardy quotient ``<= 4/n`` over
    distance-weighted cubic trial functions.
    """
    name = entry.name
    results = []
    try:
        pts = sample_points(entry.domain, n_points)
        d = distance_field(entry.domain, pts)[0]
        D = mean_distance_field(entry.domain, pts, M=M)
    except DomainConstError as exc:
        return [CheckResult("d_le_D", name, False, f"sampling failed: {exc}")]
    bad = np.flatnonzero(d > D * (1.0 + 1e-12))
    results.append(CheckResult("d_le_D", name, not bad.size,
                               "" if not bad.size else
                               f"d > D at {bad.size} points, first {pts[bad[0]].tolist()}"))
    if facts is None:
        try:
            facts = facts_from_geometry(entry.domain)
        except DomainConstError:
            facts = DomainFacts()
    if facts.theta is not None:
        factor = 2.0 / math.sqrt(omega(math.sin(facts.theta) / 2.0, 2))
        bad = np.flatnonzero(D > factor * d * (1.0 + tol))
        results.append(CheckResult("omega_comparison", name, not bad.size,
                                   f"theta={facts.theta:.12g}" if not bad.size else
                                   f"D > {factor:.6g} d at {bad.size} points"))
    try:
        q = davies_quotient(entry.domain, 3, M)
        ok = q <= 2.0 + tol
        results.append(CheckResult("mean_distance_hardy", name, ok, f"quotient={q:.12g}"))
    except DomainConstError as exc:
        results.append(CheckResult("mean_distance_hardy", name, False, str(exc)))
    return results


# ---------------------------------------------------------------------------
# catalog driver and reports
# ---------------------------------------------------------------------------

def thread_count(n_entries: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return max(1, min(n_entries, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return max(1, min(n, n_entries))


def _run_one(entry, property_checks):
    res = run_entry(entry, with_intervals=True)
    if property_checks:
        res.checks.extend(run_property_checks(entry, facts=res.facts))
    return res


def provenance(entries, property_checks=True) -> dict:
    settings = {"property_checks": property_checks, "sample_points": 200,
                "mean_distance_directions": 256}
    blob = json.dumps({"catalog": [e.to_dict() for e in entries], "settings": settings},
                      sort_keys=True, separators=(",", ":"))
    return {"config_hash": hashlib.sha256(blob.encode()).hexdigest(), "settings": settings}


def run_catalog(entries=None, property_checks: bool = True,
                threads: Optional[int] = None) -> VerificationReport:
    """Run every entry (concurrently when allowed) and assemble the report.

    Rows keep catalog order whatever the completion order.
    """
    entries = default_catalog() if entries is None else list(entries)
    if threads is None:
        threads = thread_count(len(entries))
    if threads > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda e: _run_one(e, property_checks), entries))
    else:
        results = [_run_one(e, property_checks) for e in entries]
    rows = [r for res in results for r in res.rows]
    checks = [c for res in results for c in res.checks]
    ok = all(r.status == "pass" for r in rows) and all(c.passed for c in checks)
    return VerificationReport(rows, checks, "pass" if ok else "fail",
                              provenance(entries, property_checks), results)


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _num(x):
    s = _fmt(x)
    return s if s in ("nan", "inf", "-inf") else float(s)


def format_report(report: VerificationReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.rows:
            w.writerow([r.domain, r.constant, _fmt(r.estimate), _fmt(r.interval_lo),
                        _fmt(r.interval_hi), _fmt(r.margin), r.status])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report: VerificationReport, fmt: str, path) -> Path:
    """Write the report as ``csv`` or ``json`` with LF line endings."""
    text = format_report(report, fmt)
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportIOError(path, exc.strerror or exc) from None
    return path


def empty_report() -> VerificationReport:
    return VerificationReport([], [], "pass", provenance([]))
