"""Command-line driver for the derivation and verification pipeline.

Every command reads a deformation family (a bundled fixture name or a JSON
file), runs one stage, and emits a schema-versioned JSON report on stdout;
``--format text`` renders the same content as plain ASCII.  Exit status is
0 for success, 1 when a mathematical check fails, 2 for usage errors.
Reports contain no timestamps or environment data, so identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Tuple

from .diffop import DiffOperator, normalize
from .family import FamilySpec
from .fixtures import FAMILY_NAMES, fixture_family, published_operator
from .gdwork import ReductionError, derive_pf_1param, restrict_to_parameter
from .groebner import GroebnerBasis
from .iseries import (
    axis_series,
    build_series,
    check_annihilation,
    involution_shift_check,
    mirror_map,
    sigma_ladder_check,
    _component_ranges,
)
from .gdwork import jacobian_ideal
from .relations import find_relations, rank_audit
from .scalars import Q

SCHEMA = "picardfuchs-cli/1"


class UsageError(Exception):
    pass


def _load_family(spec: str) -> FamilySpec:
    if spec in FAMILY_NAMES:
        return fixture_family(spec)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"family {spec!r} is neither a bundled fixture "
                         f"({', '.join(FAMILY_NAMES)}) nor a readable file")
    try:
        return FamilySpec.from_json(path.read_text())
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot parse family file {spec}: {e}") from e


def _load_operator(spec: str) -> DiffOperator:
    path = Path(spec)
    if path.is_file():
        try:
            return DiffOperator.from_json(path.read_text())
        except (ValueError, KeyError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot parse operator file {spec}: {e}") from e
    try:
        return published_operator(spec)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _rationals(text: str, want: int, what: str) -> Tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != want:
        raise UsageError(f"{what} needs {want} comma-separated values, "
                         f"got {len(parts)}")
    out = []
    for p in parts:
        try:
            out.append(Q(p))
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"bad rational {p!r} in {what}") from e
    return tuple(out)


def _operator_doc(op: DiffOperator) -> dict:
    return json.loads(op.to_json())


def _emit(doc: dict, fmt: str, text_lines) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        for line in text_lines:
            sys.stdout.write(line + "\n")


# -- commands -----------------------------------------------------------------

def cmd_derive(args) -> int:
    fs = _load_family(args.family)
    if args.param not in fs.parameters():
        raise UsageError(f"family has no parameter {args.param!r}")
    sub = fs if len(fs.parameters()) == 1 else \
        restrict_to_parameter(fs, args.param)
    try:
        op = derive_pf_1param(sub, max_order=args.max_order)
    except ReductionError as e:
        doc = {"schema": SCHEMA, "command": "derive", "family": args.family,
               "parameter": args.param, "status": "no-operator",
               "detail": str(e)}
        _emit(doc, args.format, [f"derive {args.param}: FAIL ({e})"])
        return 1
    doc = {"schema": SCHEMA, "command": "derive", "family": args.family,
           "parameter": args.param, "order": op.order(),
           "operator": _operator_doc(op)}
    _emit(doc, args.format,
          [f"derive {args.param}: order {op.order()}", str(op)])
    return 0


def cmd_relations(args) -> int:
    fs = _load_family(args.family)
    gb = GroebnerBasis.compute(jacobian_ideal(fs), witnesses=False)
    rels = find_relations(fs, gb, args.level)
    doc = {"schema": SCHEMA, "command": "relations", "family": args.family,
           "level": args.level, "count": len(rels),
           "relations": [
               {"coefficients": {",".join(map(str, p.multidegree)): str(c)
                                 for p, c in r.coefficients}}
               for r in rels]}
    lines = [f"level {args.level}: {len(rels)} relations"]
    for r in rels:
        lines.append("  " + "  +  ".join(
            f"({c}) * m^{p.multidegree}" for p, c in r.coefficients))
    _emit(doc, args.format, lines)
    return 0


def cmd_rank(args) -> int:
    fs = _load_family(args.family)
    gb = GroebnerBasis.compute(jacobian_ideal(fs), witnesses=False)
    count, relations, span = rank_audit(fs, gb, args.level)
    doc = {"schema": SCHEMA, "command": "rank", "family": args.family,
           "level": args.level, "products": count,
           "relation_rank": relations, "span_dimension": span}
    _emit(doc, args.format,
          [f"level {args.level}: {count} products, relation rank "
           f"{relations}, span dimension {span}"])
    return 0


def cmd_verify_op(args) -> int:
    fs = _load_family(args.family)
    op = _load_operator(args.operator)
    if args.mutate:
        op = _mutated(op, args.seed)
    missing = [p for p in op.params if p not in fs.parameters()]
    if missing:
        raise UsageError(f"operator parameters {missing} not in family")
    if len(op.params) == 1 and len(fs.parameters()) > 1:
        cap = _rationals(args.bounds, 1, "--bounds")[0] if args.bounds \
            else Q(12)
        series = axis_series(fs, op.params[0], cap)
    else:
        n = len(fs.parameters())
        bounds = _rationals(args.bounds, n, "--bounds") if args.bounds \
            else _default_bounds(fs)
        series = build_series(fs, bounds)
    report = check_annihilation(op, series)
    doc = {"schema": SCHEMA, "command": "verify-op", "family": args.family,
           "mutated": bool(args.mutate), "report": report}
    status = "PASS" if report["pass"] else "FAIL"
    _emit(doc, args.format,
          [f"verify-op {args.operator}: {status} "
           f"({report['residual_count']} residuals over "
           f"{report['lattice_points']} lattice points)"])
    return 0 if report["pass"] else 1


def cmd_shift_check(args) -> int:
    fs = _load_family(args.family)
    a_cap, b_cap, c_cap = (int(x) for x in
                           _rationals(args.bounds, 3, "--bounds"))
    check = involution_shift_check if args.identity == "published" \
        else sigma_ladder_check
    ok = bad = 0
    failures = []
    sweep = (Q(a_cap, 2), Q(b_cap, _w0(fs)), Q(2 * c_cap))
    for a, b, c in _component_ranges(fs, sweep):
        if check(SectorIndex(a, b, c), fs):
            ok += 1
        else:
            bad += 1
            if len(failures) < 10:
                failures.append([a, b, str(Q(c))])
    doc = {"schema": SCHEMA, "command": "shift-check", "family": args.family,
           "identity": args.identity,
           "bounds": [a_cap, b_cap, c_cap], "ok": ok, "bad": bad,
           "first_failures": failures}
    status = "PASS" if bad == 0 else "FAIL"
    _emit(doc, args.format,
          [f"shift-check ({args.identity}): {status} ({ok} ok, {bad} bad)"])
    return 0 if bad == 0 else 1


def cmd_mirror_map(args) -> int:
    fs = _load_family(args.family)
    n = len(fs.parameters())
    bounds = _rationals(args.bounds, n, "--bounds") if args.bounds \
        else _default_bounds(fs, small=True)
    data = mirror_map(fs, bounds)
    zero = tuple(Q(0) for _ in bounds)
    checks = {
        "unit_leading": data.F.get(zero) == 1,
        "corrections_vanish_at_origin": all(
            zero not in g for g in data.g.values()),
        "j_unit_normalized": data.j_z1.get(zero) == 1 and all(
            v == 0 for e, v in data.j_z1.items() if e != zero),
    }
    doc = {"schema": SCHEMA, "command": "mirror-map", "family": args.family,
           "bounds": [str(b) for b in bounds],
           "fundamental_terms": len(data.F),
           "checks": checks}
    ok = all(checks.values())
    _emit(doc, args.format,
          [f"mirror-map: {'PASS' if ok else 'FAIL'} "
           f"({len(data.F)} fundamental-series terms)"])
    return 0 if ok else 1


# -- helpers ------------------------------------------------------------------

def _w0(fs: FamilySpec) -> int:
    if fs.provenance is None:
        raise UsageError("family carries no cover data")
    return fs.provenance[1].weights[0]


def _default_bounds(fs: FamilySpec, small: bool = False):
    w0 = _w0(fs)
    return (Q(2), Q(2, w0), Q(2)) if small else (Q(3), Q(3, w0), Q(4))


def _mutated(op: DiffOperator, seed: int) -> DiffOperator:
    """Deterministically perturb one coefficient; used as a FAIL control."""
    import random
    rng = random.Random(seed)
    keys = sorted(op.terms)
    k = keys[rng.randrange(len(keys))]
    from .scalars import ParamPolynomial
    bump = ParamPolynomial.const(op.params, rng.randrange(1, 7))
    terms = dict(op.terms)
    terms[k] = terms[k] + bump
    return DiffOperator(op.params, terms)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="picardfuchs",
        description="Exact operator derivation and series verification for "
                    "twisted hypersurface families.")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="derive the one-parameter operator")
    p.add_argument("--family", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--max-order", type=int, default=12)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("relations", help="monomial relations at one level")
    p.add_argument("--family", required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("rank", help="product/relation rank audit")
    p.add_argument("--family", required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("verify-op",
                       help="check a stored operator against the series")
    p.add_argument("--family", required=True)
    p.add_argument("--operator", required=True,
                   help="operator JSON file or published fixture name")
    p.add_argument("--bounds")
    p.add_argument("--mutate", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_op)

    p = sub.add_parser("shift-check",
                       help="exhaustive index-shift identity sweep")
    p.add_argument("--family", required=True)
    p.add_argument("--bounds", required=True,
                   help="a,b,c caps for the integer index sweep")
    p.add_argument("--identity", choices=("published", "ladder"),
                   default="published")
    p.set_defaults(func=cmd_shift_check)

    p = sub.add_parser("mirror-map",
                       help="fundamental period and mirror-map jets")
    p.add_argument("--family", required=True)
    p.add_argument("--bounds")
    p.set_defaults(func=cmd_mirror_map)

    args = parser.parse_args(argv)
    if args.command in ("derive", "relations", "rank") and \
            getattr(args, "level", 1) is not None and \
            getattr(args, "level", 1) < 1:
        parser.error("--level must be positive")
    if getattr(args, "max_order", 1) < 1:
        parser.error("--max-order must be positive")
    try:
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
