"""JSON problem files and reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional

import jsonschema

from .certified import CertifiedReal, decimal_interval
from .fields import FieldDescriptor, FieldError
from .heights import Place, ff_place, infinite_places, primes_above
from .polynomial import MultivariatePolynomial
from .subspaces import SubspaceBasis


class MalformedInput(ValueError):
    pass


_element = {"anyOf": [{"type": "string"}, {"type": "integer"},
                      {"type": "array"}, {"type": "object"}]}
_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _element}}

FIELD_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["rational", "quadratic", "function"]},
        "d": {"type": "integer"},
        "q": {"type": "integer"},
    },
}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["field", "subspace"],
    "properties": {
        "field": FIELD_SCHEMA,
        "subspace": {"type": "object", "required": ["basis"], "properties": {"basis": _matrix}},
        "varieties": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["polys"],
                "properties": {"polys": {"type": "array", "minItems": 1, "items": {
                    "type": "object", "required": ["terms"],
                    "properties": {"terms": {"type": "array", "items": {
                        "type": "object", "required": ["coeff", "exps"],
                        "properties": {"coeff": _element,
                                       "exps": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                    }}},
                }}},
            },
        },
        "subspaces": {"type": "array", "items": {
            "type": "object", "required": ["basis"], "properties": {"basis": _matrix}}},
        "options": {"type": "object", "properties": {
            "precision_bits": {"type": "integer", "minimum": 1},
            "budget": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer", "minimum": 0},
        }},
    },
}

LATTICE_SCHEMA = {
    "type": "object",
    "required": ["lattices"],
    "properties": {"lattices": {"type": "array", "items": {
        "type": "object",
        "required": ["type", "basis", "R"],
        "properties": {
            "type": {"enum": ["fullrank", "sublattice"]},
            "basis": {"type": "array", "items": {"type": "array", "items": {"type": ["integer", "string"]}}},
            "R": {"type": ["integer", "string"]},
            "c": {"type": ["integer", "string"]},
            "z": {"type": "array", "items": {"type": ["integer", "string"]}},
        },
    }}},
}

TWISTED_SCHEMA = {
    "type": "object",
    "required": ["field", "x"],
    "properties": {
        "field": FIELD_SCHEMA,
        "x": {"type": "array", "minItems": 1, "items": _element},
        "components": {"type": "array", "items": {
            "type": "object", "required": ["place", "matrix"],
            "properties": {"place": {"type": "object", "required": ["kind"]}, "matrix": _matrix},
        }},
    },
}


def validate(obj, schema):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        raise MalformedInput(exc.message) from exc


def parse_field(obj: dict) -> FieldDescriptor:
    validate(obj, FIELD_SCHEMA)
    try:
        if obj["kind"] == "rational":
            return FieldDescriptor.rational()
        if obj["kind"] == "quadratic":
            return FieldDescriptor.quadratic(obj["d"])
        return FieldDescriptor.function(obj["q"])
    except (KeyError, FieldError) as exc:
        raise MalformedInput(f"bad field descriptor: {exc}") from exc


def field_to_json(f: FieldDescriptor) -> dict:
    if f.kind == "rational":
        return {"kind": "rational"}
    if f.kind == "quadratic":
        return {"kind": "quadratic", "d": f.d}
    return {"kind": "function", "q": f.q}


def parse_basis(rows, f: FieldDescriptor) -> SubspaceBasis:
    try:
        return SubspaceBasis([[f.parse_element(c) for c in r] for r in rows], f)
    except (FieldError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(str(exc)) from exc


@dataclass
class Problem:
    field: FieldDescriptor
    basis: SubspaceBasis
    families: Optional[List[List[MultivariatePolynomial]]] = None
    subspaces: Optional[List[SubspaceBasis]] = None
    options: Dict[str, int] = dc_field(default_factory=dict)
    raw: dict = dc_field(default_factory=dict)


def parse_problem(obj: dict) -> Problem:
    validate(obj, PROBLEM_SCHEMA)
    f = parse_field(obj["field"])
    X = parse_basis(obj["subspace"]["basis"], f)
    fams = None
    if "varieties" in obj:
        fams = []
        try:
            for fam in obj["varieties"]:
                fams.append([MultivariatePolynomial.from_json(p, X.N, f) for p in fam["polys"]])
        except (FieldError, ValueError) as exc:
            raise MalformedInput(str(exc)) from exc
    subs = None
    if "subspaces" in obj:
        subs = [parse_basis(s["basis"], f) for s in obj["subspaces"]]
        if any(U.N != X.N for U in subs):
            raise MalformedInput("subspace dimension mismatch")
    return Problem(f, X, fams, subs, dict(obj.get("options", {})), obj)


def basis_to_json(X: SubspaceBasis) -> list:
    return [[X.field.format_element(c) for c in v] for v in X.vectors]


def problem_to_json(p: Problem) -> dict:
    out: Dict[str, Any] = {"field": field_to_json(p.field), "subspace": {"basis": basis_to_json(p.basis)}}
    if p.families is not None:
        out["varieties"] = [{"polys": [P.to_json() for P in fam]} for fam in p.families]
    if p.subspaces is not None:
        out["subspaces"] = [{"basis": basis_to_json(U)} for U in p.subspaces]
    if p.options:
        out["options"] = dict(p.options)
    return out


def parse_place(obj: dict, f: FieldDescriptor) -> Place:
    kind = obj.get("kind")
    try:
        if kind in ("inf", "arch", "ff_inf"):
            places = infinite_places(f)
            idx = obj.get("index", 1)
            return places[idx - 1]
        if kind in ("p", "ideal"):
            ps = primes_above(f, int(obj["p"]))
            return ps[obj.get("index", 1) - 1]
        if kind == "ff":
            return ff_place(obj["poly"], f.q)
    except (KeyError, IndexError, FieldError, TypeError) as exc:
        raise MalformedInput(f"bad place {obj}: {exc}") from exc
    raise MalformedInput(f"unknown place kind {kind!r}")


def place_to_json(v: Place) -> dict:
    out: Dict[str, Any] = {"kind": v.kind}
    if v.p is not None:
        out["p"] = v.p
    if v.index is not None:
        out["index"] = v.index
    if v.root is not None:
        out["root"] = v.root
    if v.split is not None:
        out["split"] = v.split
    if v.poly is not None:
        out["poly"] = list(v.poly)
    return out


# ---------------------------------------------------------------------------
# reports


def real_to_json(x: Optional[CertifiedReal], digits: int = 12) -> Optional[dict]:
    """{"exact": symbolic string or null, "interval": [lo, hi] as decimal strings}."""
    if x is None:
        return None
    lo, hi = decimal_interval(x, digits)
    sym = str(x.form) if x.form is not None else None
    return {"exact": sym, "interval": [lo, hi]}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)
