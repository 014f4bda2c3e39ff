"""Command-line front-end: ``estimate``, ``bounds``, ``verify`` and ``distance``.

Exit codes: 0 on success, 1 on a contradiction or failed verification,
2 on malformed input.  Results go to standard output (or ``--output``),
diagnostics to standard error as a single line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .bounds import ConstantSet, DomainFacts, facts_from_geometry, merge_overrides, propagate
from .errors import ContradictionError, DomainConstError
from .geometry import boundary_distance, load_domain, mean_distance
from .harness import default_catalog, format_report, load_catalog, run_catalog, thread_count
from .spectral import CONSTANTS, MAX_DEGREE, convergence_study

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
_MIN_DEGREE = {"gamma": 1, "poincare": 1, "hardy": 0}


class InputError(Exception):
    """Malformed command-line input; maps to exit code 2."""


@dataclass
class CliConfig:
    command: str
    domain_path: Optional[str] = None
    constant: Optional[str] = None
    degree: int = 8
    quad_order: Optional[int] = None
    format: str = "json"
    output: Optional[str] = None
    facts_path: Optional[str] = None
    seed_path: Optional[str] = None
    seeds: list = field(default_factory=list)
    use_cited_star_gamma_bound: bool = True
    avkhadiev_mode: str = "corrected"
    x: Optional[float] = None
    y: Optional[float] = None
    property_checks: bool = True


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="domainconst",
                description="Lower bounds and interval bounds for domain-dependent constants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", help="write results here instead of stdout")

    sp = sub.add_parser("estimate", help="Rayleigh-quotient lower bound for one constant")
    sp.add_argument("domain", help="domain JSON file")
    sp.add_argument("--constant", required=True, choices=CONSTANTS)
    sp.add_argument("--degree", type=int, default=8)
    sp.add_argument("--quad-order", type=int, default=None,
                    help="quadrature order (default 2*degree+4)")
    common(sp)

    sp = sub.add_parser("bounds", help="propagate interval bounds to a fixpoint")
    sp.add_argument("domain", nargs="?", help="domain JSON file (facts derived from it)")
    sp.add_argument("--facts", dest="facts_path", help="facts override JSON file")
    sp.add_argument("--seed-file", dest="seed_path",
                    help="JSON object mapping constant names to [lo, hi]")
    sp.add_argument("--seed", action="append", default=[], metavar="NAME=LO,HI",
                    help="seed interval; HI may be inf (repeatable)")
    sp.add_argument("--avkhadiev-mode", choices=("corrected", "as_printed"), default="corrected")
    sp.add_argument("--no-cited-star-gamma-bound", dest="use_cited_star_gamma_bound",
                    action="store_false")
    common(sp)

    sp = sub.add_parser("verify", help="run the verification harness")
    sp.add_argument("catalog", nargs="?", help="catalog JSON file (default: built-in catalog)")
    sp.add_argument("--no-property-checks", dest="property_checks", action="store_false")
    common(sp)

    sp = sub.add_parser("distance", help="boundary and mean distance at one point")
    sp.add_argument("domain", help="domain JSON file")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, required=True)
    common(sp)
    return p


def parse_config(argv) -> CliConfig:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(command=ns.command, format=ns.format, output=ns.output)
    if ns.command == "estimate":
        cfg.domain_path, cfg.constant, cfg.degree = ns.domain, ns.constant, ns.degree
        lo = _MIN_DEGREE[cfg.constant]
        if not lo <= cfg.degree <= MAX_DEGREE:
            raise InputError(f"--degree for {cfg.constant} must be in [{lo}, {MAX_DEGREE}]")
        cfg.quad_order = 2 * cfg.degree + 4 if ns.quad_order is None else ns.quad_order
    elif ns.command == "bounds":
        cfg.domain_path, cfg.facts_path, cfg.seed_path = ns.domain, ns.facts_path, ns.seed_path
        cfg.seeds = ns.seed
        cfg.use_cited_star_gamma_bound = ns.use_cited_star_gamma_bound
        cfg.avkhadiev_mode = ns.avkhadiev_mode
    elif ns.command == "verify":
        cfg.domain_path, cfg.property_checks = ns.catalog, ns.property_checks
    else:
        cfg.domain_path, cfg.x, cfg.y = ns.domain, ns.x, ns.y
        if not (math.isfinite(cfg.x) and math.isfinite(cfg.y)):
            raise InputError("--x and --y must be finite")
    return cfg


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _jnum(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _fmt(x) -> str:
    v = _jnum(x)
    return v if isinstance(v, str) else f"{v:.12g}"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _write(cfg: CliConfig, text: str, stdout):
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg.output}: {exc.strerror or exc}") from None
    else:
        stdout.write(text)


def _read_json(path, what):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"{what} file not found: {path}") from None
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON: {exc}") from None


def _domain(path):
    if not Path(path).is_file():
        raise InputError(f"domain file not found: {path}")
    try:
        return load_domain(path)
    except json.JSONDecodeError as exc:
        raise InputError(f"domain file {path} is not valid JSON: {exc}") from None


def _parse_seed(text: str):
    try:
        name, rng = text.split("=", 1)
        lo, hi = rng.split(",", 1)
        return name.strip(), (float(lo), float(hi))
    except ValueError:
        raise InputError(f"--seed expects NAME=LO,HI, got {text!r}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_estimate(cfg: CliConfig, stdout, stderr) -> int:
    domain = _domain(cfg.domain_path)
    lo = _MIN_DEGREE[cfg.constant]
    est = convergence_study(cfg.constant, domain, lo, cfg.degree, order=cfg.quad_order)
    if cfg.format == "json":
        text = _dump_json(est.to_dict())
    else:
        text = _csv([("constant", "degree", "value")]
                    + [(cfg.constant, n, _fmt(v)) for n, v in est.history])
    _write(cfg, text, stdout)
    return EXIT_OK


def _interval_rows(cs: ConstantSet):
    return {name: [_jnum(iv.lo), _jnum(iv.hi)] for name, iv in cs.as_dict().items()}


def cmd_bounds(cfg: CliConfig, stdout, stderr) -> int:
    facts = DomainFacts()
    if cfg.domain_path:
        facts = facts_from_geometry(_domain(cfg.domain_path))
    if cfg.facts_path:
        facts = merge_overrides(facts, _read_json(cfg.facts_path, "facts"))
    seeds = {}
    if cfg.seed_path:
        data = _read_json(cfg.seed_path, "seed")
        if not isinstance(data, dict):
            raise InputError("seed file must be a JSON object of [lo, hi] pairs")
        seeds.update(data)
    for s in cfg.seeds:
        name, iv = _parse_seed(s)
        seeds[name] = iv
    try:
        seed = ConstantSet.from_mapping(seeds)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad seed: {exc}") from None
    try:
        result, trace = propagate(facts, seed,
                                  use_cited_star_gamma_bound=cfg.use_cited_star_gamma_bound,
                                  avkhadiev_mode=cfg.avkhadiev_mode)
    except ContradictionError as exc:
        if cfg.format == "json":
            text = _dump_json({"status": "contradiction", "rule": exc.rule,
                               "constants": list(exc.constants), "message": str(exc)})
        else:
            text = _csv([("status", "rule", "constants", "message"),
                          ("contradiction", exc.rule, " ".join(exc.constants), str(exc))])
        _write(cfg, text, stdout)
        stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    if cfg.format == "json":
        text = _dump_json({
            "status": "ok",
            "facts": facts.to_dict(),
            "intervals": _interval_rows(result),
            "trace": [{"rule": s.rule, "constant": s.constant,
                       "old": [_jnum(s.old.lo), _jnum(s.old.hi)],
                       "new": [_jnum(s.new.lo), _jnum(s.new.hi)]} for s in trace],
        })
    else:
        rows = [("constant", "lo", "hi")]
        rows += [(n, _fmt(iv.lo), _fmt(iv.hi)) for n, iv in result.as_dict().items()]
        text = _csv(rows)
    _write(cfg, text, stdout)
    return EXIT_OK


def cmd_verify(cfg: CliConfig, stdout, stderr) -> int:
    if cfg.domain_path:
        if not Path(cfg.domain_path).is_file():
            raise InputError(f"catalog file not found: {cfg.domain_path}")
        entries = load_catalog(cfg.domain_path)
    else:
        entries = default_catalog()
    threads = thread_count(max(1, len(entries)))
    report = run_catalog(entries, property_checks=cfg.property_checks, threads=threads)
    _write(cfg, format_report(report, cfg.format), stdout)
    if report.global_status != "pass":
        failed = [f"{r.domain}/{r.constant}" for r in report.rows if r.status != "pass"]
        failed += [f"{c.domain}/{c.name}" for c in report.checks if not c.passed]
        stderr.write(f"verification failed: {', '.join(failed)}\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_distance(cfg: CliConfig, stdout, stderr) -> int:
    domain = _domain(cfg.domain_path)
    p = (cfg.x, cfg.y)
    ev = boundary_distance(domain, p)
    D = mean_distance(domain, p)
    out = {"point": [cfg.x, cfg.y], "d": ev.value, "grad": [float(g) for g in ev.gradient],
           "on_medial_axis": bool(ev.on_medial_axis), "mean_distance": D}
    if cfg.format == "json":
        text = _dump_json(out)
    else:
        text = _csv([("x", "y", "d", "grad_x", "grad_y", "on_medial_axis", "mean_distance"),
                     (_fmt(cfg.x), _fmt(cfg.y), _fmt(ev.value), _fmt(out["grad"][0]),
                      _fmt(out["grad"][1]), str(out["on_medial_axis"]).lower(), _fmt(D))])
    _write(cfg, text, stdout)
    return EXIT_OK


COMMANDS = {"estimate": cmd_estimate, "bounds": cmd_bounds,
            "verify": cmd_verify, "distance": cmd_distance}


def _one_line(exc) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg, stdout, stderr)
    except (InputError, DomainConstError, ValueError, OSError) as exc:
        stderr.write(f"error: {_one_line(exc)}\n")
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
