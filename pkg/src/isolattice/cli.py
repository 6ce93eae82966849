"""Command-line interface: all I/O is wire documents on stdin-free argv.

Exit codes: 0 success/pass, 1 domain failure (the reason travels in the
output document), 2 malformed input (diagnostics on stderr only).  No
environment variables or configuration files are consulted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    DimensionMismatchError,
    InsufficientPrecisionError,
    InvalidTypeVectorError,
    NoPushforwardError,
    NotAPolarizationLatticeError,
    NotOverBaseError,
    NotStableError,
    UnknownScenarioError,
    UnsatisfiableFamilyError,
    UnsupportedPolarizationTypeError,
    WireParseError,
)
from .galois import conjugate, verify_image_shape
from .lattices import (
    KernelData,
    canonicalize,
    compose,
    contains,
    kernel_structure,
    lattice_from_kernel,
)
from .polarization import (
    PolarizationDesc,
    dual_isogeny,
    polarization_type,
    pullback,
    pushforward,
)
from .scenarios import list_scenarios, run_scenario
from .wire import (
    WireDocument,
    conjugation_report_payload,
    decode,
    emit_document,
    matrix_json,
    parse_document,
)

_MALFORMED = (WireParseError, OSError, ValueError, DimensionMismatchError,
              InsufficientPrecisionError, UnsatisfiableFamilyError,
              UnknownScenarioError, InvalidTypeVectorError,
              UnsupportedPolarizationTypeError)


def _load(path: str, kind: str):
    with open(path, "r", encoding="utf-8") as handle:
        document = parse_document(handle.read())
    if document.kind != kind:
        raise WireParseError(
            f"expected a {kind} document, got {document.kind}", path=path)
    return decode(document)


def _parse_generator_spec(spec: str):
    """Generators from a file (kernel document or JSON array) or an inline
    array; tuples written with parentheses are accepted."""
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as handle:
            text = handle.read()
        try:
            document = parse_document(text)
        except WireParseError:
            document = None
        if document is not None:
            if document.kind != "kernel":
                raise WireParseError(
                    f"expected a kernel document, got {document.kind}",
                    path=spec)
            return decode(document)
    else:
        text = spec
    try:
        data = json.loads(text.replace("(", "[").replace(")", "]"))
    except json.JSONDecodeError as exc:
        raise WireParseError(f"bad generator list: {exc.msg}",
                             line=exc.lineno, column=exc.colno)
    if not isinstance(data, list) or any(not isinstance(g, list) for g in data):
        raise WireParseError("generators must be an array of vectors")
    return [[int(x) for x in g] for g in data]


def _emit(obj) -> None:
    sys.stdout.write(emit_document(obj))


def _report(payload: dict) -> WireDocument:
    return WireDocument("report", payload)


# --- command handlers (return the process exit code) ------------------------


def _cmd_from_kernel(args) -> int:
    gens = _parse_generator_spec(args.gens)
    if isinstance(gens, KernelData):
        kernel = gens
        if kernel.modulus != args.modulus:
            raise WireParseError(
                f"--modulus {args.modulus} disagrees with the document "
                f"modulus {kernel.modulus}")
    else:
        if gens:
            n = len(gens[0])
        elif args.dim:
            n = args.dim
        else:
            raise WireParseError(
                "empty generator list needs --dim to fix the dimension")
        kernel = KernelData(n, args.modulus, gens)
    _emit(lattice_from_kernel(kernel))
    return 0


def _cmd_canon(args) -> int:
    _emit(canonicalize(_load(args.file, "lattice")))
    return 0


def _cmd_contains(args) -> int:
    outer = _load(args.outer, "lattice")
    inner = _load(args.inner, "lattice")
    answer = contains(outer, inner)
    _emit(_report({"contains": answer}))
    return 0 if answer else 1


def _cmd_kernel(args) -> int:
    lattice = _load(args.file, "lattice")
    try:
        invariants = kernel_structure(lattice)
    except NotOverBaseError as exc:
        _emit(_report({"kernel": None, "reason": str(exc)}))
        return 1
    _emit(_report({"kernel": {
        "factors": list(invariants.factors),
        "modulus": invariants.modulus,
        "generators": [list(g) for g in invariants.generators],
        "order": invariants.order,
    }}))
    return 0


def _cmd_compose(args) -> int:
    _emit(compose(_load(args.first, "lattice"), _load(args.second, "lattice")))
    return 0


def _cmd_dual(args) -> int:
    _emit(dual_isogeny(_load(args.file, "lattice")))
    return 0


def _cmd_gram(args) -> int:
    try:
        type_vector = tuple(int(d) for d in args.type.split(","))
    except ValueError:
        raise WireParseError(f"bad type vector {args.type!r}")
    _emit(PolarizationDesc.from_type(type_vector))
    return 0


def _cmd_pullback(args) -> int:
    _emit(pullback(_load(args.isogeny, "lattice"),
                   _load(args.polarization, "polarization")))
    return 0


def _cmd_pushforward(args) -> int:
    isogeny = _load(args.isogeny, "lattice")
    pol = _load(args.polarization, "polarization")
    try:
        result = pushforward(isogeny, pol)
    except NoPushforwardError as exc:
        _emit(_report({"pushforward": None, "reason": exc.reason}))
        return 1
    except NotOverBaseError as exc:
        _emit(_report({"pushforward": None, "reason": str(exc)}))
        return 1
    _emit(_report({"d": result.d, "matrix": matrix_json(result.lattice.matrix)}))
    return 0


def _cmd_pol_type(args) -> int:
    lattice = _load(args.lattice, "lattice")
    try:
        type_vector = polarization_type(lattice)
    except NotAPolarizationLatticeError as exc:
        _emit(_report({"type": None, "reason": str(exc)}))
        return 1
    _emit(_report({"type": list(type_vector)}))
    return 0


def _cmd_conjugate(args) -> int:
    sigma = _load(args.sigma, "galois-element")
    lattice = _load(args.lattice, "lattice")
    try:
        _emit(conjugate(sigma, lattice, args.out_prec))
    except NotStableError as exc:
        _emit(_report({"conjugate": None, "reason": str(exc)}))
        return 1
    return 0


def _cmd_verify(args) -> int:
    report = verify_image_shape(
        _load(args.family, "family"), _load(args.lattice, "lattice"),
        _load(args.target, "family"), seed=args.seed, count=args.count)
    _emit(_report(conjugation_report_payload(report)))
    return 0 if report.passed else 1


def _cmd_scenario_list(_args) -> int:
    _emit(_report({"scenarios": [
        {"name": name, "description": description}
        for name, description in list_scenarios()]}))
    return 0


def _cmd_scenario_run(args) -> int:
    parameters = {}
    if args.l is not None:
        parameters["l"] = args.l
    if args.seed is not None:
        parameters["seed"] = args.seed
    if args.count is not None:
        parameters["count"] = args.count
    report = run_scenario(args.name, parameters)
    _emit(_report(report.to_payload()))
    return 0 if report.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isolattice",
        description="exact lattice calculus for isogeny kernels, Galois "
                    "conjugation, and polarization transport")
    top = parser.add_subparsers(dest="group", required=True)

    lattice = top.add_parser("lattice", help="kernel lattices and containment")
    sub = lattice.add_subparsers(dest="command", required=True)
    p = sub.add_parser("from-kernel", help="lattice spanned by Z^n and generators/m")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--gens", required=True,
                   help="kernel document path, JSON array path, or inline array")
    p.add_argument("--dim", type=int, default=None,
                   help="dimension when the generator list is empty")
    p.set_defaults(handler=_cmd_from_kernel)
    p = sub.add_parser("canon", help="canonical basis of a lattice")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_canon)
    p = sub.add_parser("contains", help="does the first lattice contain the second")
    p.add_argument("outer")
    p.add_argument("inner")
    p.set_defaults(handler=_cmd_contains)
    p = sub.add_parser("kernel", help="invariant factors of lattice / base")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_kernel)

    isogeny = top.add_parser("isogeny", help="composition and duals")
    sub = isogeny.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compose", help="matrix product of two lattice bases")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(handler=_cmd_compose)
    p = sub.add_parser("dual", help="transpose basis matrix")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_dual)

    pol = top.add_parser("pol", help="polarization calculus")
    sub = pol.add_subparsers(dest="command", required=True)
    p = sub.add_parser("gram", help="standard Gram matrix for a type vector")
    p.add_argument("--type", required=True, help="comma-separated, e.g. 1,3")
    p.set_defaults(handler=_cmd_gram)
    p = sub.add_parser("pullback", help="pull a polarization back along an isogeny")
    p.add_argument("isogeny")
    p.add_argument("polarization")
    p.set_defaults(handler=_cmd_pullback)
    p = sub.add_parser("pushforward", help="push a polarization along an isogeny")
    p.add_argument("isogeny")
    p.add_argument("polarization")
    p.set_defaults(handler=_cmd_pushforward)
    p = sub.add_parser("type", help="type vector of a polarization lattice")
    p.add_argument("lattice")
    p.set_defaults(handler=_cmd_pol_type)

    galois = top.add_parser("galois", help="conjugation and image verification")
    sub = galois.add_subparsers(dest="command", required=True)
    p = sub.add_parser("conjugate", help="matrix of the action in a lattice basis")
    p.add_argument("sigma")
    p.add_argument("lattice")
    p.add_argument("--out-prec", type=int, required=True)
    p.set_defaults(handler=_cmd_conjugate)
    p = sub.add_parser("verify", help="conjugate a family and check a target shape")
    p.add_argument("family")
    p.add_argument("lattice")
    p.add_argument("target")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None,
                   help="sample count; omit for exhaustive enumeration")
    p.set_defaults(handler=_cmd_verify)

    scenario = top.add_parser("scenario", help="named worked reproductions")
    sub = scenario.add_subparsers(dest="command", required=True)
    p = sub.add_parser("list", help="available scenarios")
    p.set_defaults(handler=_cmd_scenario_list)
    p = sub.add_parser("run", help="run one scenario and report each step")
    p.add_argument("name")
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.set_defaults(handler=_cmd_scenario_run)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _MALFORMED as exc:
        print(f"isolattice: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
