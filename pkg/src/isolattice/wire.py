"""Bit-exact JSON wire format for every domain object.

A document is ``{"kind": ..., "payload": ...}`` where kind is one of
lattice, kernel, galois-element, family, polarization, report.  Rationals
travel as strings ``"numerator/denominator"`` in lowest terms with positive
denominator (a bare ``"3"`` and ``"3/1"`` are both accepted on input; bare
integers are emitted).  Emission sorts keys and is deterministic, so byte
equality of two emissions is equality of the underlying objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import IsolatticeError, WireParseError
from .galois import (
    ConjugationReport,
    EntryRule,
    GaloisElement,
    MatrixFamily,
    SideCondition,
)
from .lattices import KernelData, LatticeMatrix
from .linalg import Matrix
from .polarization import PolarizationDesc

KINDS = ("lattice", "kernel", "galois-element", "family", "polarization",
         "report")


@dataclass(frozen=True)
class WireDocument:
    kind: str
    payload: dict


def rational_str(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text, path: str = "") -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise WireParseError(
            f"rational must be a string, got {type(text).__name__}", path=path)
    parts = text.split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
            if den == 0:
                raise WireParseError("zero denominator", path=path)
            return Fraction(num, den)
    except ValueError:
        pass
    raise WireParseError(f"malformed rational {text!r}", path=path)


def matrix_json(matrix: Matrix) -> list:
    return [[rational_str(e) for e in row] for row in matrix.rows()]


def json_matrix(data, path: str = "matrix") -> Matrix:
    if (not isinstance(data, list) or not data
            or any(not isinstance(row, list) for row in data)):
        raise WireParseError("matrix must be a non-empty array of arrays",
                             path=path)
    rows = [[parse_rational(e, path=f"{path}[{i}][{j}]")
             for j, e in enumerate(row)] for i, row in enumerate(data)]
    try:
        return Matrix(rows)
    except ValueError as exc:
        raise WireParseError(str(exc), path=path)


def _int_grid(data, path: str) -> list:
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise WireParseError("expected an array of integer arrays", path=path)
    out = []
    for i, row in enumerate(data):
        for j, e in enumerate(row):
            if not isinstance(e, int) or isinstance(e, bool):
                raise WireParseError("expected an integer",
                                     path=f"{path}[{i}][{j}]")
        out.append(list(row))
    return out


def _require_int(payload, key, path_prefix=""):
    value = payload.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise WireParseError(f"field {key!r} must be an integer",
                             path=f"{path_prefix}{key}")
    return value


# --- encoding ----------------------------------------------------------------


def _rule_json(rule: EntryRule) -> dict:
    if rule.kind == "const":
        return {"kind": "const", "value": rule.value}
    if rule.kind == "param":
        return {"kind": "param", "name": rule.name,
                "constraint": rule.constraint}
    return {"kind": "free", "constraint": rule.constraint}


def _condition_json(cond: SideCondition) -> dict:
    return {
        "solve_for": cond.solve_for,
        "poly": [{"coeff": coeff, "vars": [[name, power] for name, power in vars_]}
                 for coeff, vars_ in cond.poly],
    }


def residue_json(value: int, modulus: int) -> dict:
    return {"value": value % modulus, "modulus": modulus}


def conjugation_report_payload(report: ConjugationReport) -> dict:
    counterexample = None
    if report.first_counterexample is not None:
        ce = report.first_counterexample
        counterexample = {
            "index": ce.index,
            "element": [list(r) for r in ce.element.entries],
            "conjugated": (None if ce.conjugated is None
                           else [list(r) for r in ce.conjugated.entries]),
            "reason": ce.reason,
        }
    return {
        "total": report.total,
        "failures": report.failures,
        "mode": report.mode,
        "seed": report.seed,
        "passed": report.passed,
        "first_counterexample": counterexample,
    }


def encode(obj) -> WireDocument:
    """Wrap a domain object in its wire document."""
    if isinstance(obj, WireDocument):
        return obj
    if isinstance(obj, LatticeMatrix):
        return WireDocument("lattice", {
            "n": obj.n, "matrix": matrix_json(obj.matrix)})
    if isinstance(obj, KernelData):
        return WireDocument("kernel", {
            "n": obj.n, "modulus": obj.modulus,
            "generators": [list(g) for g in obj.generators]})
    if isinstance(obj, GaloisElement):
        return WireDocument("galois-element", {
            "n": obj.n, "prime": obj.prime, "precision": obj.precision,
            "entries": [list(r) for r in obj.entries]})
    if isinstance(obj, MatrixFamily):
        return WireDocument("family", {
            "n": obj.n, "prime": obj.prime, "precision": obj.precision,
            "pattern": [[_rule_json(rule) for rule in row]
                        for row in obj.pattern],
            "side_conditions": [_condition_json(c)
                                for c in obj.side_conditions]})
    if isinstance(obj, PolarizationDesc):
        return WireDocument("polarization", {
            "g": obj.g, "type": list(obj.type_vector),
            "gram": [[int(e) for e in row] for row in obj.gram.rows()]})
    if isinstance(obj, ConjugationReport):
        return WireDocument("report", conjugation_report_payload(obj))
    if isinstance(obj, dict):
        return WireDocument("report", obj)
    if hasattr(obj, "to_payload"):
        return WireDocument("report", obj.to_payload())
    raise TypeError(f"cannot encode {type(obj).__name__}")


# --- decoding ----------------------------------------------------------------


def _decode_lattice(payload) -> LatticeMatrix:
    n = _require_int(payload, "n")
    matrix = json_matrix(payload.get("matrix"), path="matrix")
    if matrix.nrows != n or matrix.ncols != n:
        raise WireParseError(f"matrix is not {n}x{n}", path="matrix")
    try:
        return LatticeMatrix(matrix)
    except IsolatticeError as exc:
        raise WireParseError(str(exc), path="matrix")


def _decode_kernel(payload) -> KernelData:
    n = _require_int(payload, "n")
    modulus = _require_int(payload, "modulus")
    gens = _int_grid(payload.get("generators", []), "generators")
    try:
        return KernelData(n, modulus, gens)
    except ValueError as exc:
        raise WireParseError(str(exc), path="generators")


def _decode_galois(payload) -> GaloisElement:
    try:
        return GaloisElement(
            _require_int(payload, "n"), _require_int(payload, "prime"),
            _require_int(payload, "precision"),
            _int_grid(payload.get("entries"), "entries"))
    except (ValueError, IsolatticeError) as exc:
        raise WireParseError(str(exc), path="entries")


def _decode_rule(data, path) -> EntryRule:
    if not isinstance(data, dict) or "kind" not in data:
        raise WireParseError("entry rule must be an object with a kind",
                             path=path)
    kind = data["kind"]
    try:
        if kind == "const":
            return EntryRule("const", value=_require_int(data, "value", path + "."))
        if kind == "free":
            return EntryRule("free", constraint=data.get("constraint", "free"))
        if kind == "param":
            return EntryRule("param", name=data.get("name"),
                             constraint=data.get("constraint", "free"))
    except ValueError as exc:
        raise WireParseError(str(exc), path=path)
    raise WireParseError(f"unknown entry rule kind {kind!r}", path=path)


def _decode_condition(data, path) -> SideCondition:
    if not isinstance(data, dict) or "solve_for" not in data or "poly" not in data:
        raise WireParseError("side condition needs solve_for and poly", path=path)
    poly = []
    for i, mono in enumerate(data["poly"]):
        if not isinstance(mono, dict) or "coeff" not in mono:
            raise WireParseError("monomial needs a coeff", path=f"{path}.poly[{i}]")
        vars_ = tuple((str(name), int(power))
                      for name, power in mono.get("vars", []))
        poly.append((_require_int(mono, "coeff", f"{path}.poly[{i}]."), vars_))
    return SideCondition(tuple(poly), str(data["solve_for"]))


def _decode_family(payload) -> MatrixFamily:
    n = _require_int(payload, "n")
    pattern_data = payload.get("pattern")
    if not isinstance(pattern_data, list):
        raise WireParseError("pattern must be an array", path="pattern")
    pattern = [[_decode_rule(rule, f"pattern[{i}][{j}]")
                for j, rule in enumerate(row)]
               for i, row in enumerate(pattern_data)]
    conditions = [_decode_condition(c, f"side_conditions[{i}]")
                  for i, c in enumerate(payload.get("side_conditions", []))]
    try:
        return MatrixFamily(n, _require_int(payload, "prime"),
                            _require_int(payload, "precision"),
                            pattern, conditions)
    except (ValueError, IsolatticeError) as exc:
        raise WireParseError(str(exc), path="pattern")


def _decode_polarization(payload) -> PolarizationDesc:
    g = _require_int(payload, "g")
    type_vector = payload.get("type")
    if (not isinstance(type_vector, list)
            or any(not isinstance(d, int) for d in type_vector)):
        raise WireParseError("type must be an array of integers", path="type")
    gram = Matrix(_int_grid(payload.get("gram"), "gram"))
    try:
        return PolarizationDesc(g, tuple(type_vector), gram)
    except (ValueError, IsolatticeError) as exc:
        raise WireParseError(str(exc), path="gram")


_DECODERS = {
    "lattice": _decode_lattice,
    "kernel": _decode_kernel,
    "galois-element": _decode_galois,
    "family": _decode_family,
    "polarization": _decode_polarization,
}


def decode(document: WireDocument):
    """Domain object for a structural document; the payload for reports."""
    if document.kind == "report":
        return document.payload
    return _DECODERS[document.kind](document.payload)


def emit_document(obj) -> str:
    """Canonical text of a document: sorted keys, two-space indent,
    lowest-terms rationals, trailing newline."""
    document = encode(obj)
    return json.dumps({"kind": document.kind, "payload": document.payload},
                      sort_keys=True, indent=2) + "\n"


def parse_document(text: str) -> WireDocument:
    """Parse and validate a document, normalizing the payload to canonical
    form.  Raises ``WireParseError`` with position information."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WireParseError(exc.msg, line=exc.lineno, column=exc.colno)
    if not isinstance(raw, dict) or set(raw) != {"kind", "payload"}:
        raise WireParseError("document must be an object with exactly "
                             "'kind' and 'payload'", path="$")
    kind = raw["kind"]
    if kind not in KINDS:
        raise WireParseError(f"unknown document kind {kind!r}", path="kind")
    payload = raw["payload"]
    if not isinstance(payload, dict):
        raise WireParseError("payload must be an object", path="payload")
    if kind == "report":
        return WireDocument("report", payload)
    return encode(_DECODERS[kind](payload))
