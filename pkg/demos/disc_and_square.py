"""Lower bounds on the unit disc and the unit square, then the propagated intervals.

Run with ``python3 demos/disc_and_square.py``.
"""

from domainconst import (ConstantSet, Disc, convergence_study, facts_from_geometry, propagate,
                         unit_square)
from domainconst.bounds import format_interval


def show(name, domain):
    print(f"== {name}")
    est = {}
    for const, lo in (("gamma", 1), ("poincare", 1), ("hardy", 0)):
        study = convergence_study(const, domain, lo, 8)
        est[const] = study.value
        hist = "  ".join(f"{v:.5f}" for _, v in study.history)
        print(f"{const:>9}: {hist}")

    facts = facts_from_geometry(domain)
    seed = ConstantSet.from_mapping({k: (v, None) for k, v in est.items()})
    intervals, trace = propagate(facts, seed)
    for const, iv in intervals.as_dict().items():
        print(f"{const:>13} in {format_interval(iv)}")
    print(f"({len(trace)} narrowing steps)")


if __name__ == "__main__":
    show("unit disc", Disc((0.0, 0.0), 1.0))
    show("unit square", unit_square())
