"""Command-line interface.

Exit codes: 0 success, 1 tolerance breach or unconverged integral, 2 usage
or input error.  ``SIMPLEXMOMENTS_THREADS`` caps the BLAS/OpenMP thread
pools used by numpy.

A ``<solid>`` argument is a catalog name or alias (``T3``, ``cube``,
``"square pyramid"``) or the path of a polytope JSON file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import catalog as cat
from .moments import DEFAULT_MAX_WORK, CapacityError, ball_moment, even_moment
from .serialization import SchemaError, format_number, load_polytope, reports_to_csv, reports_to_json

THREADS_ENV = "SIMPLEXMOMENTS_THREADS"

log = logging.getLogger("simplexmoments")


class CliError(Exception):
    """Reported on stderr with exit status 2."""


def _entry(solid: str) -> cat.CatalogEntry:
    path = Path(solid)
    if path.suffix == ".json" and path.is_file():
        try:
            P, gens = load_polytope(path.read_text())
        except SchemaError as exc:
            raise CliError(f"{path}: {exc}") from None
        return cat.CatalogEntry(P.name or path.stem, P, gens)
    try:
        return cat.get(solid)
    except cat.UnknownSolidError as exc:
        raise CliError(str(exc)) from None


def _configs_of(entry: cat.CatalogEntry) -> list:
    if entry.generators or entry.name in cat.names():
        return entry.configurations
    from .symmetry import affine_symmetries, enumerate_configurations

    return enumerate_configurations(entry.polytope, affine_symmetries(entry.polytope.vertices))


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_list(args) -> int:
    for name in cat.names():
        entry = cat.get(name)
        star = " *" if entry.starred else ""
        print(f"{name}\td={entry.dim}\tvertices={len(entry.polytope.vertices)}{star}")
    return 0


def cmd_configs(args) -> int:
    entry = _entry(args.solid)
    configs = _configs_of(entry)
    if args.json:
        _print_json([c.as_dict() for c in configs])
        return 0
    print(f"{'label':<6} {'pub':<6} {'o_C':>4} {'w_C':>4} {'n_C':>4}  S")
    for c in configs:
        print(f"{c.label:<6} {c.published_label or '-':<6} {c.orbit_size:>4} {c.weight:>4} {c.order:>4}  "
              f"{{{', '.join(map(str, c.vertices))}}}")
        for note in c.notes:
            print(f"       note: {note}")
    print(f"total weight {sum(c.weight for c in configs)}")
    return 0


def cmd_genealogy(args) -> int:
    from .symmetry import build_genealogy, export_dot

    entry = _entry(args.solid)
    configs = _configs_of(entry)
    text = export_dot(build_genealogy(configs, entry.group), name=entry.name.replace(" ", "_"))
    if args.dot == "-":
        sys.stdout.write(text)
    else:
        Path(args.dot).write_text(text)
        print(f"wrote {args.dot} ({len(configs)} configurations)")
    return 0


def cmd_export(args) -> int:
    from .serialization import dump_polytope

    entry = _entry(args.solid)
    sys.stdout.write(dump_polytope(entry.polytope, entry.generators))
    return 0


def cmd_even_moment(args) -> int:
    if args.k < 0 or args.k % 2:
        raise CliError(f"k={args.k} is not a non-negative even integer; "
                       f"odd orders go through `simplexmoments odd-moment {args.solid} -k {args.k}`")
    entry = _entry(args.solid)
    try:
        value = even_moment(entry.polytope, args.k, max_work=args.max_work)
    except CapacityError as exc:
        raise CliError(f"{exc}; raise --max-work or lower k") from None
    print(format_number(value))
    return 0


def _quadrature_spec(args):
    from .quadrature import QuadratureSpec

    if args.nodes is not None:
        return QuadratureSpec(scheme="gauss-legendre", nodes=args.nodes, tol=args.tol)
    level = args.level
    return QuadratureSpec(level=level, max_level=max(level, args.max_level), tol=args.tol)


def cmd_odd_moment(args) -> int:
    from .section import SectionMomentUnavailable, odd_moment

    entry = _entry(args.solid)
    try:
        spec = _quadrature_spec(args)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    configs = _configs_of(entry)
    labels = {c.label for c in configs}
    for label in args.config or ():
        if label not in labels:
            raise CliError(f"no configuration {label!r} for {entry.name}; known: {', '.join(c.label for c in configs)}")
    reference = None
    if not args.config:
        k_key = int(args.k) if float(args.k).is_integer() else args.k
        ref = cat.references_for(entry.name).get((entry.name, "moment", None, k_key, None))
        reference = ref.value if ref else None
    try:
        est = odd_moment(entry.polytope, args.k, spec, configs=configs, only=args.config,
                         reference=reference, telemetry=sys.stderr if args.telemetry else None)
    except (SectionMomentUnavailable, ValueError) as exc:
        raise CliError(str(exc)) from None
    if args.json:
        _print_json(est.as_dict())
    else:
        for label, (value, err) in est.per_config.items():
            print(f"{label:<6} w={est.weights[label]:<4} value={format_number(value)}  error={err:.3g}")
        print(f"total {format_number(est.total)}  error {est.error_estimate:.3g}")
        if est.reference is not None:
            print(f"reference {est.reference} = {format_number(float(est.reference))}  "
                  f"relative discrepancy {est.discrepancy:.3g}")
    if est.flagged:
        print(f"not converged: {', '.join(est.flagged)}", file=sys.stderr)
        return 1
    return 0


def _print_estimate(est, as_json: bool) -> None:
    if as_json:
        _print_json(est.as_dict())
        return
    lo, hi = est.ci95
    print(f"mean {format_number(est.mean)}  95% CI [{format_number(lo)}, {format_number(hi)}]  N={est.N}")
    if est.control is not None:
        plo, phi = est.plain_ci95
        print(f"plain mean {format_number(est.plain_mean)}  95% CI [{format_number(plo)}, {format_number(phi)}]")


def cmd_mc(args) -> int:
    from .montecarlo import mc_moment

    entry = _entry(args.solid)
    try:
        est = mc_moment(entry.polytope, args.n, args.k, args.N, args.seed,
                        control_variate=not args.no_control)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _print_estimate(est, args.json)
    return 0


def cmd_efron(args) -> int:
    from .montecarlo import efron_mean

    entry = _entry(args.solid)
    try:
        est = efron_mean(entry.polytope, args.n, args.N, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _print_estimate(est, args.json)
    return 0


def cmd_ball(args) -> int:
    try:
        value = ball_moment(args.d, args.k)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(value)
    if value.is_exact and not value.is_rational:
        print(f"= {format_number(float(value))}")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite, suite_names

    if args.suite not in suite_names():
        raise CliError(f"unknown suite {args.suite!r}; available: {', '.join(suite_names())}")
    reports = run_suite(args.suite, seed=args.seed, timing=args.timing)
    out = reports_to_json(reports) if args.format == "json" else reports_to_csv(reports)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(reports)} checks outside tolerance: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simplexmoments",
                                description="Moments of random simplex volumes in convex polytopes.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list", help="catalog solids")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("configs", help="configuration table of a solid")
    s.add_argument("solid")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_configs)

    s = sub.add_parser("genealogy", help="configuration genealogy as DOT")
    s.add_argument("solid")
    s.add_argument("--dot", required=True, metavar="FILE", help="output file, '-' for stdout")
    s.set_defaults(func=cmd_genealogy)

    s = sub.add_parser("export", help="polytope JSON of a catalog solid")
    s.add_argument("solid")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("even-moment", help="exact even moment")
    s.add_argument("solid")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--max-work", type=int, default=DEFAULT_MAX_WORK, help="cap on expansion terms")
    s.set_defaults(func=cmd_even_moment)

    s = sub.add_parser("odd-moment", help="odd moment by section integration")
    s.add_argument("solid")
    s.add_argument("-k", type=float, required=True)
    s.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per axis (default: tanh-sinh)")
    s.add_argument("--level", type=int, default=3, help="first tanh-sinh level")
    s.add_argument("--max-level", type=int, default=4, help="last tanh-sinh level")
    s.add_argument("--tol", type=float, default=1e-6, help="target relative error")
    s.add_argument("--config", action="append", metavar="LABEL", help="only this configuration (repeatable)")
    s.add_argument("--telemetry", action="store_true", help="JSON lines on stderr")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_odd_moment)

    s = sub.add_parser("mc", help="Monte Carlo metric moment")
    s.add_argument("solid")
    s.add_argument("-n", type=int, required=True, help="hull of n+1 points")
    s.add_argument("-k", type=float, required=True)
    s.add_argument("-N", type=int, required=True, help="samples")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--no-control", action="store_true", help="plain estimator only")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("efron", help="mean volume from volume fractions of random planes (d=3)")
    s.add_argument("solid")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-N", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_efron)

    s = sub.add_parser("ball", help="moment of the random simplex volume in the unit ball")
    s.add_argument("-d", type=int, required=True)
    s.add_argument("-k", type=int, required=True)
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("verify", help="run a named suite and emit reports")
    s.add_argument("suite")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--timing", action="store_true", help="record runtimes (output no longer reproducible)")
    s.add_argument("-o", "--output", help="write to file instead of stdout")
    s.set_defaults(func=cmd_verify)
    return p


def _limit_threads():
    value = os.environ.get(THREADS_ENV)
    if not value:
        return None
    try:
        count = int(value)
    except ValueError:
        raise CliError(f"{THREADS_ENV} must be an integer, got {value!r}") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=count)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        limiter = _limit_threads()
        try:
            return args.func(args)
        finally:
            if limiter is not None:
                limiter.restore_original_limits()
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
