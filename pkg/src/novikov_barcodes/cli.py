"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 bad input or arguments.
Output goes to ``--output``, else to ``$NOVIKOV_BARCODES_OUT/<command>.<ext>``
when that variable is set, else to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .barcode import Barcode, barcode
from .coefficients import (
    ConfigurationError,
    CyclotomicRational,
    DomainError,
    ExponentGroup,
    PreconditionError,
    format_rational,
    is_prime,
    parse_rational,
)
from .complexes import FilteredChainComplex, build_cone, verify_complex
from .cyclic import (
    CyclicActionData,
    check_repair,
    divisibility_invariant,
    generate_power_p_fixture,
    repair_to_group_action,
    verify_p_tuple_multiplicity,
)
from .eggbeater import (
    build_model,
    egg_cone_report,
    expected_concise,
    product_cone_crosscheck,
    product_multiplicity,
)
from .complexes import betti_complex
from .filtered_linalg import FilteredMap, check_svd, svd

SCHEMA_VERSION = 1
OUTPUT_ENV = "NOVIKOV_BARCODES_OUT"


class InputError(Exception):
    """Raised for unreadable or malformed inputs (exit code 2)."""


class VerificationFailure(Exception):
    """Raised when a verification command finds a violated invariant (exit code 1)."""

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated integer list")


def _rational_list(text: str) -> list:
    return [_rational(x) for x in text.split(",") if x.strip()]


def _load_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _stamp(payload: dict) -> dict:
    out = dict(payload)
    out["schema_version"] = SCHEMA_VERSION
    return out


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str, ext: str):
    target = args.output
    if target is None and os.environ.get(OUTPUT_ENV):
        target = str(Path(os.environ[OUTPUT_ENV]) / f"{args.command}.{ext}")
    if target is None or target == "-":
        sys.stdout.write(text)
        return
    path = Path(target)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _emit_payload(args, payload: dict, bc: Barcode | None = None):
    if args.format == "csv":
        if bc is None:
            raise InputError(f"{args.command} has no CSV form")
        _emit(args, bc.to_csv(), "csv")
    else:
        _emit(args, _dump(_stamp(payload)), "json")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_svd(args) -> int:
    data = _load_json(args.input)
    try:
        A = FilteredMap.from_json(data.get("map", data))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed map: {exc}") from exc
    res = svd(A)
    problems = check_svd(A, res)
    payload = {"svd": res.to_json(), "problems": problems}
    _emit(args, _dump(_stamp(payload)), "json")
    if problems:
        raise VerificationFailure("svd failed its own checks")
    return 0


def _load_complex(path: str) -> FilteredChainComplex:
    data = _load_json(path)
    try:
        return FilteredChainComplex.from_json(data.get("complex", data))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed complex: {exc}") from exc


def cmd_barcode(args) -> int:
    C = _load_complex(args.input)
    report = verify_complex(C)
    if not report.ok:
        raise VerificationFailure(f"input complex is invalid: {report.violations[:3]}")
    bc = barcode(C, args.mode)
    if args.concise:
        bc = bc.concise()
    payload = {"barcode": bc.to_json(), "multiplicities": {str(k): v for k, v in bc.multiplicities().items()}}
    _emit_payload(args, payload, bc)
    return 0


def cmd_cone(args) -> int:
    data = _load_json(args.input)
    try:
        C = FilteredChainComplex.from_json(data["complex"])
        T = {
            int(k): FilteredMap.from_json(m).with_spaces(C.space(int(k)), C.space(int(k)))
            for k, m in data["T"].items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed cone input: {exc}") from exc
    shift = CyclotomicRational.xi(C.prime, args.xi_power) if args.xi_power else CyclotomicRational.zero(C.prime)
    cone = build_cone(C, T, shift)
    payload = {"cone": cone.to_json()}
    if args.barcode:
        bc = barcode(cone, args.mode)
        payload["barcode"] = bc.to_json()
        _emit_payload(args, payload, bc)
    else:
        _emit_payload(args, payload)
    return 0


def cmd_eggbeater(args) -> int:
    gamma = ExponentGroup([args.lam]) if args.perturb_seed is not None else None
    model = build_model(args.p, args.lam, args.seed, gamma)
    report = egg_cone_report(model, args.xi_power, args.perturb_seed)
    payload = report.to_json()
    expected = {
        "concise": 1 << (2 * args.p),
        "zero_length": (args.p - 1) << (2 * args.p),
        "per_degree_concise_ok": all(
            report.degree(k).concise == expected_concise(args.p, k) for k in range(-args.p + 1, args.p + 2)
        ),
    }
    payload["expected"] = expected
    if args.format == "csv":
        _emit(args, report.barcode.to_csv(), "csv")
    else:
        payload["barcode"] = report.barcode.to_json()
        _emit(args, _dump(_stamp(payload)), "json")
    if (
        report.concise_total != expected["concise"]
        or report.zero_length_total != expected["zero_length"]
        or not expected["per_degree_concise_ok"]
    ):
        raise VerificationFailure("egg-beater multiplicities differ from the closed formulas")
    return 0


def cmd_product(args) -> int:
    res = product_multiplicity(args.p, args.betti, args.chern)
    payload = {"p": args.p, "betti": args.betti, "chern": args.chern, **res.to_json(), "nondivisible": not res.divisible}
    if args.crosscheck:
        if args.seed is None:
            raise InputError("--crosscheck needs --seed")
        if args.chern:
            raise InputError("--crosscheck uses the N = 0 formula; pass --chern 0")
        model = build_model(args.p, args.lam, args.seed)
        check = product_cone_crosscheck(model, betti_complex(args.betti, args.p))
        payload["crosscheck"] = check.to_json()
        _emit(args, _dump(_stamp(payload)), "json")
        if not check.ok:
            raise VerificationFailure("direct and tensor-rule multiplicities disagree")
        return 0
    _emit(args, _dump(_stamp(payload)), "json")
    return 0


def cmd_fixtures(args) -> int:
    items = []
    for i in range(args.count):
        data = generate_power_p_fixture(args.p, args.size, args.seed + i)
        items.append(data.to_json())
    _emit(args, _dump(_stamp({"fixtures": items})), "json")
    return 0


def _verify_fixture(data: CyclicActionData, truncation) -> dict:
    problems = list(data.check())
    try:
        problems += check_repair(data, repair_to_group_action(data, truncation))
    except DomainError as exc:
        problems.append(str(exc))
    bc = barcode(data.cone, "image")
    divisible = verify_p_tuple_multiplicity(bc, data.p)
    o = divisibility_invariant(bc, data.p)
    if not divisible:
        problems.append("a concise multiplicity is not divisible by p")
    if o != 0:
        problems.append(f"divisibility invariant is {o}, expected 0")
    return {
        "seed": data.seed,
        "concise_bars": len(bc.concise()),
        "divisible": divisible,
        "invariant": format_rational(o),
        "problems": problems,
    }


def cmd_verify(args) -> int:
    results = []
    if args.input:
        raw = _load_json(args.input)
        try:
            fixtures = [CyclicActionData.from_json(d) for d in raw.get("fixtures", [raw])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed fixture file: {exc}") from exc
    elif args.fixtures == "power-p":
        if args.seed is None:
            raise InputError("--seed is required to generate fixtures")
        fixtures = (generate_power_p_fixture(args.p, args.size, args.seed + i) for i in range(args.count))
    else:
        raise InputError("nothing to verify: pass --fixtures power-p or --input")
    for data in fixtures:
        results.append(_verify_fixture(data, args.truncation))
    failed = [r["seed"] for r in results if r["problems"]]
    payload = {"p": args.p, "count": len(results), "failed_seeds": failed, "results": results, "ok": not failed}
    _emit(args, _dump(_stamp(payload)), "json")
    if failed:
        raise VerificationFailure(f"{len(failed)} fixture(s) failed")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="novikov-barcodes",
        description="Exact barcodes of filtered complexes over Novikov fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv")):
        sp.add_argument("--output", "-o", help="output file ('-' for stdout)")
        sp.add_argument("--format", choices=formats, default="json")
        sp.add_argument("--gamma", type=_rational_list, default=None, help="exponent group generators")
        sp.add_argument("--truncation", type=_rational, default=None, help="series truncation order")

    sp = sub.add_parser("svd", help="singular value decomposition of a filtered map (JSON)")
    sp.add_argument("--input", "-i", required=True)
    common(sp, ("json",))
    sp.set_defaults(func=cmd_svd)

    sp = sub.add_parser("barcode", help="barcode of a filtered chain complex (JSON)")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--mode", choices=("kernel", "image"), default="kernel")
    sp.add_argument("--concise", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_barcode)

    sp = sub.add_parser("cone", help="self-mapping cone of T - xi^q I")
    sp.add_argument("--input", "-i", required=True, help='JSON with "complex" and per-degree "T"')
    sp.add_argument("--xi-power", type=int, default=1, help="q in xi_p^q (0 for the plain cone of T)")
    sp.add_argument("--barcode", action="store_true", help="also compute the cone barcode")
    sp.add_argument("--mode", choices=("kernel", "image"), default="kernel")
    common(sp)
    sp.set_defaults(func=cmd_cone)

    sp = sub.add_parser("eggbeater", help="egg-beater cone multiplicity report")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1))
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--xi-power", type=int, default=1)
    sp.add_argument("--perturb-seed", type=int, default=None, help="replace T by a homotopic perturbation")
    common(sp)
    sp.set_defaults(func=cmd_eggbeater)

    sp = sub.add_parser("product", help="degree-1 multiplicity for the product with M")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--betti", type=_int_list, required=True, help="b_0,...,b_2n")
    sp.add_argument("--chern", type=int, default=0, help="minimal Chern number N (0: qb = b)")
    sp.add_argument("--crosscheck", action="store_true", help="also compute the product cone directly")
    sp.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1))
    sp.add_argument("--seed", type=int, default=None)
    common(sp, ("json",))
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("fixtures", help="generate seeded p-cyclic fixtures (JSON)")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--size", type=int, default=2)
    common(sp, ("json",))
    sp.set_defaults(func=cmd_fixtures)

    sp = sub.add_parser("verify", help="check p-tuple multiplicities on fixtures")
    sp.add_argument("--fixtures", choices=("power-p",), default=None)
    sp.add_argument("--input", "-i", default=None, help="fixture JSON produced by 'fixtures'")
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--size", type=int, default=2)
    common(sp, ("json",))
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (PreconditionError, DomainError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
