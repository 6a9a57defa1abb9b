"""Named verification suites producing :class:`Report` rows.

A suite is a function of ``(seed, timing)`` returning a list of reports in
a fixed order.  With ``timing=False`` (the default) the rows carry no wall
clock, so repeated runs serialise byte for byte the same.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from . import catalog as cat
from .moments import ball_mean, even_moment, segment_moment, square_moment, triangle_moment
from .serialization import format_number

__all__ = ["Report", "SUITES", "run_suite", "suite_names"]


@dataclass
class Report:
    name: str
    quantity: str
    value: object
    reference: object = None
    tolerance: float = 0.0
    passed: bool = False
    abs_discrepancy: float | None = None
    rel_discrepancy: float | None = None
    runtime_s: float | None = None
    spec: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "quantity": self.quantity,
            "value": _fmt(self.value),
            "reference": _fmt(self.reference),
            "abs_discrepancy": _fmt(self.abs_discrepancy),
            "rel_discrepancy": _fmt(self.rel_discrepancy),
            "tolerance": _fmt(self.tolerance),
            "passed": self.passed,
            "runtime_s": None if self.runtime_s is None else round(self.runtime_s, 3),
            "spec": dict(self.spec),
        }


def _fmt(x):
    if x is None or isinstance(x, (str, bool)):
        return x
    if type(x).__name__ == "ClosedFormValue":
        return str(x) if x.is_exact else format_number(float(x))
    return format_number(x)


def _numeric(name, quantity, value, reference, tol, *, exact=False, spec=None) -> Report:
    """Compare ``value`` with ``reference``; ``exact`` asks for equality."""
    if exact:
        diff = abs(value - reference.rational()) if reference.is_rational else abs(float(value) - float(reference))
        ok = value == reference
        ref = float(reference)
        rel = float(diff) / abs(ref) if ref else float(diff)
        return Report(name, quantity, value, reference, 0.0, bool(ok), diff, rel, spec=spec or {})
    ref = float(reference)
    diff = abs(float(value) - ref)
    rel = diff / abs(ref) if ref else diff
    return Report(name, quantity, float(value), reference, tol, rel <= tol, diff, rel, spec=spec or {})


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _even_table(seed, timing):
    start = time.perf_counter()
    rows = []
    for r in cat.REFERENCES:
        if r.quantity != "moment" or r.k == 0 or r.k % 2 or r.n is not None:
            continue
        P = cat.get(r.solid).polytope
        if P.dim > 4:
            continue
        value = even_moment(P, r.k)
        rows.append(_numeric(f"{r.solid} k={r.k}", "even moment", value, r.value, 0.0, exact=True,
                             spec={"provenance": r.provenance}))
        if r.erratum is not None:
            rows.append(_numeric(f"{r.solid} k={r.k} (corrected)", "even moment", value, r.erratum, 0.0,
                                 exact=True, spec={"provenance": r.provenance}))
    if timing:
        for row in rows:
            row.runtime_s = (time.perf_counter() - start) / len(rows)
    return rows


def _closed_forms(seed, timing):
    rows = []
    for k in range(10):
        r = cat.reference("T2", k)
        rows.append(_numeric(f"triangle k={k}", "closed form", triangle_moment(k), r.value, 0.0, exact=True))
        if r.erratum is not None:
            rows.append(_numeric(f"triangle k={k} (corrected)", "closed form", triangle_moment(k),
                                 r.erratum, 0.0, exact=True))
    for k in range(1, 10):
        r = cat.reference("C2", k)
        rows.append(_numeric(f"square k={k}", "closed form", square_moment(k), r.value, 0.0, exact=True))
    for k in (2, 4, 6):
        r = cat.reference("T1", k)
        rows.append(_numeric(f"segment k={k}", "closed form", segment_moment(k), r.value, 0.0, exact=True))
    from .moments import ClosedFormValue

    rows.append(_numeric("ball d=3", "mean volume", ball_mean(3).rational(),
                         ClosedFormValue("9/715"), 0.0, exact=True))
    return rows


# published (w_C, n_C) lists used by the configuration suite
CONFIG_TARGETS = {
    "T3": ([4, 6], None),
    "O3": ([6, 12, 4], [4, 6, 6]),
    "C3": ([8, 12, 24, 4, 3], [3, 4, 5, 6, 4]),
    "square pyramid": ([1, 4, 4, 4], None),
    "triangular prism": ([6, 6, 3, 1, 6], None),
    "triangular bipyramid": ([3, 2, 3, 6], None),
    "C4": ([w for _, w, _ in cat._PUBLISHED_LABELS["C4"]], None),
    "O4": ([8, 24, 32, 16], None),
    "T5": ([6, 15, 10], None),
}


def _multiset_gap(a, b) -> int:
    ca, cb = Counter(a), Counter(b)
    return sum(((ca - cb) + (cb - ca)).values())


def config_report(solid: str) -> Report:
    weights, orders = CONFIG_TARGETS[solid]
    configs = cat.get(solid).configurations
    got_w = [c.weight for c in configs]
    got_n = [c.order for c in configs]
    gap = _multiset_gap(got_w, weights) + abs(len(configs) - len(weights))
    value = f"count={len(configs)} w={sorted(got_w)}"
    reference = f"count={len(weights)} w={sorted(weights)}"
    if orders is not None:
        gap += _multiset_gap(got_n, orders)
        value += f" n={sorted(got_n)}"
        reference += f" n={sorted(orders)}"
    notes = [f"{c.label}: {note}" for c in configs for note in c.notes]
    return Report(solid, "configurations", value, reference, 0.0, gap == 0, gap,
                  gap / (2 * len(weights)), spec={"notes": notes})


def _configs(seed, timing):
    return [_timed(timing, lambda s=s: config_report(s)) for s in CONFIG_TARGETS]


def _odd(solid, k, tol, configs=None, level=3):
    from .quadrature import QuadratureSpec
    from .section import config_contribution, odd_moment

    spec = QuadratureSpec(level=level, max_level=max(level, 4))
    P = cat.get(solid).polytope
    if configs is None:
        est = odd_moment(P, k, spec)
        return _numeric(f"{solid} k={k}", "odd moment", est.total, cat.reference(solid, k).value, tol,
                        spec=spec.as_dict() | {"error_estimate": est.error_estimate, "flagged": est.flagged})
    rows = []
    for cfg in cat.get(solid).configurations:
        if cfg.label not in configs:
            continue
        res = config_contribution(P, cfg, k, spec)
        ref = cat.reference(solid, k, quantity="config", config=cfg.label)
        rows.append(_numeric(f"{solid} config {cfg.label} k={k}", "configuration integral", res.value, ref.value,
                             tol, spec=spec.as_dict() | {"error_estimate": res.error, "converged": res.converged}))
    return rows


def _d3_odd_first(seed, timing):
    rows = [_timed(timing, lambda: _odd("T3", 1, 1e-4))]
    rows += _timed_many(timing, lambda: _odd("T3", 1, 1e-6, configs=["I"]))
    rows += _timed_many(timing, lambda: _odd("T3", 1, 1e-4, configs=["II"]))
    rows.append(_timed(timing, lambda: _odd("C3", 1, 1e-3)))
    rows.append(_timed(timing, lambda: _odd("O3", 1, 1e-3)))
    return rows


def _d3_odd_third(seed, timing):
    return [_timed(timing, lambda: _odd("T3", 3, 1e-3))]


def _d4_config_i(seed, timing):
    return _timed_many(timing, lambda: _odd("T4", 1, 1e-4, configs=["I"]))


def _d4_odd_first(seed, timing):
    return [_timed(timing, lambda: _odd("T4", 1, 1e-3))]


def _mc_report(name, est, reference, max_half_width=None) -> Report:
    ref = float(reference)
    ok = est.contains(ref) and (max_half_width is None or est.half_width <= max_half_width)
    diff = abs(est.mean - ref)
    return Report(name, "monte carlo mean", est.mean, reference, est.half_width, ok, diff, diff / abs(ref),
                  spec={"ci95": [format_number(x) for x in est.ci95], "N": est.N, "seed": est.seed,
                        "plain_ci95": [format_number(x) for x in est.plain_ci95],
                        "max_half_width": max_half_width})


def _mc_small(seed, timing):
    from .montecarlo import mc_moment

    return [
        _timed(timing, lambda: _mc_report("T2 n=2 k=2", mc_moment(cat.get("T2").polytope, 2, 2, 10**6, seed),
                                          cat.reference("T2", 2).value)),
        _timed(timing, lambda: _mc_report("C2 n=2 k=1", mc_moment(cat.get("C2").polytope, 2, 1, 10**6, seed),
                                          cat.reference("C2", 1).value)),
    ]


def _mc_t4(seed, timing):
    from .montecarlo import mc_moment

    return [_timed(timing, lambda: _mc_report(
        "T4 n=4 k=1", mc_moment(cat.get("T4").polytope, 4, 1, 10**8, seed),
        cat.reference("T4", 1).value, max_half_width=5e-7))]


def _efron(seed, timing):
    from .montecarlo import efron_mean

    return [
        _timed(timing, lambda: _mc_report("T3 efron n=3", efron_mean(cat.get("T3").polytope, 3, 10**7, seed),
                                          cat.reference("T3", 1).value)),
        _timed(timing, lambda: _mc_report("C3 efron n=3", efron_mean(cat.get("C3").polytope, 3, 10**6, seed),
                                          cat.reference("C3", 1).value)),
    ]


def _timed(timing: bool, fn: Callable) -> Report:
    start = time.perf_counter()
    report = fn()
    if timing:
        report.runtime_s = time.perf_counter() - start
    return report


def _timed_many(timing: bool, fn: Callable) -> list:
    start = time.perf_counter()
    reports = fn()
    if timing:
        for r in reports:
            r.runtime_s = (time.perf_counter() - start) / len(reports)
    return reports


SUITES = {
    "even-table": _even_table,
    "closed-forms": _closed_forms,
    "configs": _configs,
    "d3-odd-first": _d3_odd_first,
    "d3-odd-third": _d3_odd_third,
    "d4-config-i": _d4_config_i,
    "d4-odd-first": _d4_odd_first,
    "mc-small": _mc_small,
    "mc-t4": _mc_t4,
    "efron": _efron,
}


def suite_names() -> list:
    return list(SUITES)


def run_suite(name: str, seed: int = 0, timing: bool = False) -> list:
    try:
        suite = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(SUITES)}") from None
    return suite(seed, timing)
