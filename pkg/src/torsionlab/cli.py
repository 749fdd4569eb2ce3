"""Command-line surface: exact-arithmetic reports for every toolkit module.

Subcommands: divpoly, torsion, condp, twists, family (verify/gen), galois
(sample/groups/containment), census.  Text output keeps every number as an
exact rational (or quadratic scalar); ``--json`` switches to a
machine-readable report validating against the schemas in docs/schemas.
Exit codes: 0 success, 1 domain error (a computation refused its input),
2 usage error (arguments that never reached a computation).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import census as census_mod
from .divpoly import (
    division_poly,
    format_bipoly,
    primitive_division_poly,
    primitive_division_poly_at,
)
from .errors import ParseError, TorsionLabError
from .exactnum import format_scalar, parse_scalar
from .families import family_for_pair, specialize_family, verify_family
from .galois import (
    VARIANTS,
    conjugate_containment,
    cycle_types,
    distribution_distance,
    enumerate_group,
    frobenius_sample,
)
from .polylab import format_poly
from .torsion import condition_P, torsion_subgroup, twist_classes

#: Environment variable supplying the default --threads value.
THREADS_ENV = "TORSIONLAB_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Per-invocation context shared by the subcommand handlers."""

    field: int | None = None
    seed: int = 0
    threads: int = 1
    out: str | None = None
    as_json: bool = False


class _UsageError(Exception):
    """Malformed command-line arguments (exit code 2)."""


# ---------------------------------------------------------------------------
# argument coercion


def _scalar(text: str):
    try:
        return parse_scalar(text)
    except ParseError as exc:
        raise _UsageError(str(exc)) from exc


def _curve(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise _UsageError("expected a curve as 'A,B', got %r" % text)
    return _scalar(parts[0]), _scalar(parts[1])


def _int_pair(text: str) -> tuple:
    parts = text.split(",")
    try:
        m, n = (int(p) for p in parts)
    except ValueError as exc:
        raise _UsageError("expected an integer pair 'm,n', got %r" % text) from exc
    return m, n


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise _UsageError(
            "expected comma-separated integers, got %r" % text
        ) from exc


def _pattern_key(part: tuple) -> str:
    return "+".join(str(d) for d in part)


def _dist_json(dist) -> dict:
    return {_pattern_key(part): str(f) for part, f in dist.items}


def _dec6(value) -> str:
    return "%.6g" % float(value)


# ---------------------------------------------------------------------------
# output plumbing


def _emit(config: RunConfig, text: str, payload: dict) -> int:
    body = (
        json.dumps(payload, sort_keys=True, indent=2) if config.as_json else text
    )
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(body + "\n")
    else:
        print(body)
    return 0


def _config(ns) -> RunConfig:
    threads = getattr(ns, "threads", None)
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    return RunConfig(
        field=getattr(ns, "field", None),
        seed=getattr(ns, "seed", 0),
        threads=threads,
        out=getattr(ns, "out", None),
        as_json=getattr(ns, "json", False),
    )


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_divpoly(ns) -> int:
    config = _config(ns)
    if ns.at is not None:
        A, B = _curve(ns.at)
        poly = primitive_division_poly_at(ns.N, A, B)
        formula = format_poly(poly)
        kind = "specialized"
    elif ns.psi:
        poly = division_poly(ns.N)
        formula = format_bipoly(poly)
        kind = "psi"
    else:
        poly = primitive_division_poly(ns.N).poly
        formula = format_bipoly(poly)
        kind = "primitive"
    payload = {
        "command": "divpoly",
        "N": ns.N,
        "kind": kind,
        "formula": formula,
    }
    return _emit(config, formula, payload)


def _shape_text(shape) -> str:
    points = ", ".join(
        "(%s,%s)" % (format_scalar(P.x), format_scalar(P.y))
        for P in shape.generators
    )
    if shape.n == 1:
        return "trivial"
    if shape.m == 1:
        return "Z/%dZ, generator %s" % (shape.n, points)
    return "Z/%dZ x Z/%dZ, generators %s" % (shape.m, shape.n, points)


def _cmd_torsion(ns) -> int:
    config = _config(ns)
    A, B = _curve(ns.curve)
    shape = torsion_subgroup(A, B, d=config.field)
    payload = {
        "command": "torsion",
        "field": config.field,
        "m": shape.m,
        "n": shape.n,
        "generators": [
            [format_scalar(P.x), format_scalar(P.y)] for P in shape.generators
        ],
    }
    return _emit(config, _shape_text(shape), payload)


def _cmd_condp(ns) -> int:
    config = _config(ns)
    A, B = _curve(ns.curve)
    ok = condition_P(A, B, ns.m, ns.n, config.field)
    payload = {
        "command": "condp",
        "field": config.field,
        "m": ns.m,
        "n": ns.n,
        "satisfied": ok,
    }
    return _emit(config, "true" if ok else "false", payload)


def _cmd_twists(ns) -> int:
    config = _config(ns)
    A, B = _curve(ns.curve)
    report = twist_classes(A, B, ns.m, ns.n, config.field)
    if report.every_class:
        text = "every square class"
    elif report.classes():
        text = ", ".join(format_scalar(D) for D in report.classes())
    else:
        text = "none"
    payload = {
        "command": "twists",
        "field": config.field,
        "m": ns.m,
        "n": ns.n,
        "every_class": report.every_class,
        "classes": [format_scalar(D) for D in report.classes()],
        "checked": [
            [format_scalar(D), bool(ok)] for D, ok in report.pairs
        ],
    }
    return _emit(config, text, payload)


def _cmd_family_verify(ns) -> int:
    config = _config(ns)
    m, n = _int_pair(ns.pair)
    spec = family_for_pair(m, n, samples=ns.samples)
    report = verify_family(spec, samples=ns.samples)
    lines = [
        "family (%d, %d): %s" % (m, n, "passed" if report.passed else "FAILED"),
        "  split condition: %s" % report.split_ok,
        "  root identity:   %s" % report.root_identity_ok,
        "  degree equation: %s" % report.degree_ok,
    ]
    lines.extend("  failure: %s" % f for f in report.failures)
    payload = {
        "command": "family-verify",
        "m": m,
        "n": n,
        "samples": report.samples,
        "passed": report.passed,
        "split_ok": report.split_ok,
        "root_identity_ok": report.root_identity_ok,
        "degree_ok": report.degree_ok,
        "failures": list(report.failures),
    }
    return _emit(config, "\n".join(lines), payload)


def _cmd_family_gen(ns) -> int:
    config = _config(ns)
    m, n = _int_pair(ns.pair)
    r = _scalar(ns.r)
    u = _scalar(ns.u)
    spec = family_for_pair(m, n)
    curve = specialize_family(spec, r, u, d=config.field)
    text = "A = %s\nB = %s" % (format_scalar(curve.A), format_scalar(curve.B))
    payload = {
        "command": "family-gen",
        "m": m,
        "n": n,
        "r": format_scalar(r),
        "u": format_scalar(u),
        "field": curve.d,
        "A": format_scalar(curve.A),
        "B": format_scalar(curve.B),
    }
    return _emit(config, text, payload)


def _cmd_galois_groups(ns) -> int:
    config = _config(ns)
    m, n = _int_pair(ns.pair)
    group = enumerate_group(ns.N, m, n, ns.variant)
    dist = cycle_types(group, ns.N)
    lines = ["order %d" % group.order]
    lines.extend(
        "  %s: %s" % (_pattern_key(part), f) for part, f in dist.items
    )
    payload = {
        "command": "galois-groups",
        "N": ns.N,
        "m": m,
        "n": n,
        "variant": ns.variant,
        "order": group.order,
        "cycle_types": _dist_json(dist),
    }
    return _emit(config, "\n".join(lines), payload)


def _cmd_galois_sample(ns) -> int:
    config = _config(ns)
    A, B = _curve(ns.curve)
    sample = frobenius_sample(A, B, ns.N, ns.primes, seed=config.seed)
    empirical = sample.distribution
    comparisons = []
    for pair in ns.compare or []:
        m, n = _int_pair(pair)
        theoretical = cycle_types(enumerate_group(ns.N, m, n, "Hbar"), ns.N)
        tv = distribution_distance(empirical, theoretical)
        comparisons.append(
            {
                "m": m,
                "n": n,
                "variant": "Hbar",
                "distribution": _dist_json(theoretical),
                "tv": str(tv),
                "tv_decimal": _dec6(tv),
            }
        )
    lines = ["sampled %d good primes" % len(sample.records)]
    lines.extend(
        "  %s: %s" % (_pattern_key(part), f) for part, f in empirical.items
    )
    for comp in comparisons:
        lines.append(
            "tv vs (%d, %d): %s (~%s)"
            % (comp["m"], comp["n"], comp["tv"], comp["tv_decimal"])
        )
    payload = {
        "command": "galois-sample",
        "A": format_scalar(A),
        "B": format_scalar(B),
        "N": ns.N,
        "primes": ns.primes,
        "seed": config.seed,
        "empirical": _dist_json(empirical),
        "excluded": list(sample.excluded),
        "comparisons": comparisons,
    }
    return _emit(config, "\n".join(lines), payload)


def _cmd_galois_containment(ns) -> int:
    config = _config(ns)
    contained = conjugate_containment(ns.N, ns.m, ns.n, ns.m2, ns.n2)
    payload = {
        "command": "galois-containment",
        "N": ns.N,
        "m": ns.m,
        "n": ns.n,
        "m2": ns.m2,
        "n2": ns.n2,
        "contained": contained,
    }
    return _emit(config, "true" if contained else "false", payload)


def _census_csv(rows) -> str:
    lines = ["X,m,n,exact_count,contains_count,ratio_num,ratio_den"]
    for row in rows:
        for m, n in census_mod.SHAPES:
            exact = row.counts[(m, n)]
            contains = row.contains_counts[(m, n)]
            if contains:
                ratio = Fraction(exact, contains)
                num, den = str(ratio.numerator), str(ratio.denominator)
            else:
                num = den = ""
            lines.append(
                "%d,%d,%d,%d,%d,%s,%s" % (row.X, m, n, exact, contains, num, den)
            )
    return "\n".join(lines)


def _cmd_census(ns) -> int:
    config = _config(ns)
    heights = _int_list(ns.heights)
    rows = census_mod.run_census(
        heights, minimal_only=ns.minimal, threads=config.threads
    )
    if not config.as_json:
        return _emit(config, _census_csv(rows), {})
    payload = {
        "command": "census",
        "heights": list(heights),
        "minimal": ns.minimal,
        "rows": [
            {
                "X": row.X,
                "total": row.total,
                "shapes": [
                    {
                        "m": m,
                        "n": n,
                        "exact": row.counts[(m, n)],
                        "contains": row.contains_counts[(m, n)],
                        "ratio": (
                            str(Fraction(row.counts[(m, n)], c))
                            if (c := row.contains_counts[(m, n)])
                            else None
                        ),
                        "ratio_decimal": (
                            _dec6(Fraction(row.counts[(m, n)], c)) if c else None
                        ),
                    }
                    for m, n in census_mod.SHAPES
                ],
            }
            for row in rows
        ],
    }
    return _emit(config, "", payload)


# ---------------------------------------------------------------------------
# parser assembly and dispatch


def _add_common(sub, field=False, seed=False, out=False):
    sub.add_argument("--json", action="store_true", help="emit a JSON report")
    if field:
        sub.add_argument(
            "--field",
            type=int,
            default=None,
            metavar="d",
            help="work over Q(sqrt(d)) instead of Q",
        )
    if seed:
        sub.add_argument(
            "--seed", type=int, default=0, help="64-bit determinism seed"
        )
    if out:
        sub.add_argument("--out", metavar="PATH", help="write output to a file")


class _CurveArgumentParser(argparse.ArgumentParser):
    """Parser that reads ``-1,0`` style curve tokens as positionals.

    Stock argparse only treats ``-<digits>`` as a possible value, so a
    negative-A curve such as ``-43,166`` would be rejected as an unknown
    option.  No torsion-lab option starts with a digit, so anything
    matching ``-<digit>`` is a value here.  Subparsers inherit this class
    (add_subparsers defaults parser_class to type(self)).
    """

    def __init__(self, *args: object, **kwargs: object) -> None:
        super().__init__(*args, **kwargs)  # type: ignore[arg-type]
        self._negative_number_matcher = re.compile(r"^-\d")


def build_parser() -> argparse.ArgumentParser:
    parser = _CurveArgumentParser(
        prog="torsion-lab",
        description="exact elliptic-curve torsion toolkit",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("divpoly", help="print a division polynomial")
    p.add_argument("N", type=int)
    p.add_argument("--psi", action="store_true", help="raw psi_n, not primitive")
    p.add_argument("--at", metavar="A,B", help="specialize at a curve")
    _add_common(p)
    p.set_defaults(handler=_cmd_divpoly)

    p = commands.add_parser("torsion", help="torsion subgroup of a curve")
    p.add_argument("curve", metavar="A,B")
    _add_common(p, field=True)
    p.set_defaults(handler=_cmd_torsion)

    p = commands.add_parser("condp", help="test the split/root condition")
    p.add_argument("curve", metavar="A,B")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    _add_common(p, field=True)
    p.set_defaults(handler=_cmd_condp)

    p = commands.add_parser("twists", help="twist classes carrying a shape")
    p.add_argument("curve", metavar="A,B")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    _add_common(p, field=True)
    p.set_defaults(handler=_cmd_twists)

    fam = commands.add_parser("family", help="torsion-family parameterizations")
    fam_sub = fam.add_subparsers(dest="family_command", required=True)
    p = fam_sub.add_parser("verify", help="run the three-condition check")
    p.add_argument("pair", metavar="m,n")
    p.add_argument("--samples", type=int, default=12)
    _add_common(p)
    p.set_defaults(handler=_cmd_family_verify)
    p = fam_sub.add_parser("gen", help="specialize a family to a curve")
    p.add_argument("pair", metavar="m,n")
    p.add_argument("r", help="parameter value")
    p.add_argument("u", help="twist scaling, nonzero")
    _add_common(p, field=True)
    p.set_defaults(handler=_cmd_family_gen)

    gal = commands.add_parser("galois", help="congruence groups and statistics")
    gal_sub = gal.add_subparsers(dest="galois_command", required=True)
    p = gal_sub.add_parser("groups", help="enumerate a congruence group")
    p.add_argument("N", type=int)
    p.add_argument("pair", metavar="m,n")
    p.add_argument("--variant", choices=list(VARIANTS), default="Hbar")
    _add_common(p)
    p.set_defaults(handler=_cmd_galois_groups)
    p = gal_sub.add_parser("sample", help="Frobenius degree-pattern sampling")
    p.add_argument("curve", metavar="A,B")
    p.add_argument("N", type=int)
    p.add_argument("--primes", type=int, default=100)
    p.add_argument(
        "--compare",
        action="append",
        metavar="m,n",
        help="also report the group distribution and TV distance",
    )
    _add_common(p, seed=True)
    p.set_defaults(handler=_cmd_galois_sample)
    p = gal_sub.add_parser("containment", help="conjugate containment test")
    p.add_argument("N", type=int)
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("m2", type=int)
    p.add_argument("n2", type=int)
    _add_common(p)
    p.set_defaults(handler=_cmd_galois_containment)

    p = commands.add_parser("census", help="height-ordered torsion census")
    p.add_argument("--heights", required=True, metavar="X1,X2,...")
    p.add_argument(
        "--minimal",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="drop non-minimal models (p^4 | A, p^6 | B)",
    )
    p.add_argument(
        "--threads", type=int, default=None, help="worker count (default %s)" % 1
    )
    _add_common(p, out=True)
    p.set_defaults(handler=_cmd_census)

    return parser


def dispatch(argv=None) -> int:
    """Parse argv, run the subcommand, and map failures to exit codes."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage/help; --help exits 0
        return 0 if not exc.code else 2
    try:
        return ns.handler(ns)
    except _UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 2
    except (TorsionLabError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())
