"""Command-line front end.

Commands: coeffs, sur, invert, localize, reconstruct, sample, verify.
Output is machine-first: exact rationals print as "p/q", structured
results as JSON (one line per record for reports). --pretty adds decimal
renderings and indentation. Exit codes: 0 success, 1 input error,
2 internal-consistency failure, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import BudgetExceededError, ConsistencyError, InputError, MomentforgeError
from .finab import FinAbGroup
from .inversion import MomentTable, multi_invert_zero
from .localize import ModuleMomentTable, localized_moments, reconstruct_probability
from .qseries import SimpleType, inversion_coefficient
from .rationals import format_rational
from .sampler import SamplerConfig, convergence_report, sample_measure
from .surjcount import TypeBasis, sur_product, sur_single


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _add_type_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--abelian", type=int, metavar="H", help="abelian type with field size H")
    p.add_argument(
        "--nonabelian-aut", type=int, metavar="A", help="nonabelian type with A automorphisms"
    )


def _simple_type(args) -> SimpleType:
    if (args.abelian is None) == (getattr(args, "nonabelian_aut", None) is None):
        raise InputError("pass exactly one of --abelian H or --nonabelian-aut A")
    if args.abelian is not None:
        return SimpleType.abelian(args.abelian)
    return SimpleType.nonabelian(args.nonabelian_aut)


def _int_list(text: str, name: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"{name} must be a comma-separated integer list: {exc}") from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _parse_group(text: str) -> FinAbGroup:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"group must be JSON like '{{\"2\":[1]}}': {exc}") from exc
    return FinAbGroup.from_json_obj(obj)


def _emit(obj, pretty: bool) -> None:
    print(json.dumps(obj, indent=2 if pretty else None))


def _emit_scalar(value: Fraction, pretty: bool) -> None:
    text = format_rational(value)
    if pretty and value.denominator != 1:
        print(f"{text} ~= {float(value):.10g}")
    else:
        print(text)


def _bracket_obj(bracket, pretty: bool) -> dict:
    obj = bracket.to_json_obj()
    if pretty:
        obj["lower_decimal"] = repr(float(bracket.lower))
        obj["upper_decimal"] = repr(float(bracket.upper))
    return obj


def _cmd_coeffs(args) -> int:
    t = _simple_type(args)
    if args.k < 0:
        raise InputError("--k must be nonnegative")
    _emit_scalar(inversion_coefficient(t, args.k), args.pretty)
    return 0


def _cmd_sur(args) -> int:
    if args.basis is not None:
        basis = TypeBasis.from_json_obj(json.loads(args.basis))
        e = _int_list(args.e, "--e")
        k = _int_list(args.k, "--k")
        _emit_scalar(Fraction(sur_product(basis, e, k)), args.pretty)
        return 0
    t = _simple_type(args)
    e = _int_list(args.e, "--e")
    k = _int_list(args.k, "--k")
    if len(e) != 1 or len(k) != 1:
        raise InputError("scalar --e and --k expected without --basis")
    _emit_scalar(Fraction(sur_single(t, e[0], k[0])), args.pretty)
    return 0


def _cmd_invert(args) -> int:
    table = MomentTable.from_json_obj(_load_json(args.file))
    if args.order is not None:
        table = table.reorder(_int_list(args.order, "--order"))
    r_max = _int_list(args.rmax, "--rmax")
    if len(r_max) == 1 and len(table.basis) > 1:
        r_max = r_max * len(table.basis)
    bracket = multi_invert_zero(table, r_max)
    _emit(_bracket_obj(bracket, args.pretty), args.pretty)
    return 0


def _table_and_basis(args) -> tuple[ModuleMomentTable, TypeBasis]:
    table = ModuleMomentTable.from_json_obj(_load_json(args.file))
    primes = _int_list(args.primes, "--primes") if args.primes else table.primes
    return table, TypeBasis.abelian_primes(primes)


def _cmd_localize(args) -> int:
    table, basis = _table_and_basis(args)
    M = _parse_group(args.group)
    k_bound = _int_list(args.kbound, "--kbound")
    if len(k_bound) == 1 and len(basis) > 1:
        k_bound = k_bound * len(basis)
    moments = localized_moments(table, M, basis, k_bound)
    _emit(moments.to_json_obj(), args.pretty)
    return 0


def _cmd_reconstruct(args) -> int:
    table, basis = _table_and_basis(args)
    M = _parse_group(args.group)
    r_max = _int_list(args.rmax, "--rmax")
    if len(r_max) == 1 and len(basis) > 1:
        r_max = r_max * len(basis)
    bracket = reconstruct_probability(table, M, basis, r_max)
    _emit(_bracket_obj(bracket, args.pretty), args.pretty)
    return 0


def _cmd_sample(args) -> int:
    config = SamplerConfig(
        p=args.p, cap=args.cap, n=args.n, u=args.u, seed=args.seed, count=args.count
    )
    if args.report:
        if not args.ts or not args.target:
            raise InputError("--report needs --ts and at least one --target")
        counts = _int_list(args.ts, "--ts")
        targets = [_parse_group(g) for g in args.target]
        records = convergence_report(config, counts, targets, args.rmax)
        for rec in records:
            print(json.dumps(rec))
        return 0
    mu = sample_measure(config)
    obj = mu.to_json_obj()
    obj["config"] = {
        "p": config.p,
        "cap": config.cap,
        "n": config.n,
        "u": config.u,
        "seed": config.seed,
        "count": config.count,
    }
    _emit(obj, args.pretty)
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(args.seed, quick=args.quick)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail} ({res.seconds:.2f}s)")
        failed += not res.passed
    if failed:
        print(f"{failed} of {len(results)} checks failed", file=sys.stderr)
        raise ConsistencyError(f"{failed} verification checks failed")
    print(f"all {len(results)} checks passed")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="momentforge", description=__doc__)
    parser.add_argument("--threads", type=int, default=1, help="parallelism bound (>=1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="inversion coefficient c_k for a simple type")
    _add_type_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=_cmd_coeffs)

    p = sub.add_parser("sur", help="closed-form surjection count between powers")
    _add_type_flags(p)
    p.add_argument("--basis", help="JSON basis for product counts")
    p.add_argument("--e", required=True, help="source exponent(s), comma separated")
    p.add_argument("--k", required=True, help="target exponent(s), comma separated")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=_cmd_sur)

    p = sub.add_parser("invert", help="bracket the mass at 0 from a moment table")
    p.add_argument("--file", required=True, help="moment-table JSON path")
    p.add_argument("--rmax", required=True, help="truncation depth(s), comma separated")
    p.add_argument("--order", help="elimination order as a permutation, e.g. 1,0")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=_cmd_invert)

    p = sub.add_parser("localize", help="localized moments at a fixed group")
    p.add_argument("--file", required=True, help="module moment-table JSON path")
    p.add_argument("--group", required=True, help="group JSON, e.g. '{\"2\":[1]}'")
    p.add_argument("--primes", help="basis primes, comma separated (default: table primes)")
    p.add_argument("--kbound", required=True, help="moment depth(s), comma separated")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=_cmd_localize)

    p = sub.add_parser("reconstruct", help="bracket the mass of a group from moments")
    p.add_argument("--file", required=True, help="module moment-table JSON path")
    p.add_argument("--group", required=True, help="group JSON, e.g. '{\"2\":[1]}'")
    p.add_argument("--primes", help="basis primes, comma separated (default: table primes)")
    p.add_argument("--rmax", required=True, help="truncation depth(s), comma separated")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=_cmd_reconstruct)

    p = sub.add_parser("sample", help="random-matrix cokernel sampling")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--cap", type=int, required=True, help="work modulo p**cap")
    p.add_argument("--n", type=int, required=True, help="matrix rows")
    p.add_argument("--u", type=int, default=0, help="extra columns")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--report", action="store_true", help="emit a convergence report")
    p.add_argument("--ts", help="sample counts for the report, comma separated")
    p.add_argument("--target", action="append", help="target group JSON (repeatable)")
    p.add_argument("--rmax", type=int, default=8, help="truncation depth for the report")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("verify", help="run the full oracle suite")
    p.add_argument("--seed", type=int, required=True, help="seed for randomized checks")
    p.add_argument("--quick", action="store_true", help="reduced desk-scale ranges")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise InputError("--threads must be >= 1")
        return args.fn(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MomentforgeError as exc:  # any other library failure is an input issue
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
