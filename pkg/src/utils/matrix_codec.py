# src/utils/matrix_codec.py

from typing import Any, Dict, List, Tuple

import numpy as np
from jsonschema import Draft7Validator

from src.common.exception.dilation_exceptions import InvalidInput
from src.components.cp_maps.kraus_maps import KrausFamily
from src.components.cp_maps.flip_construction import FlipUnitary, FLIP_ORDERING
from src.components.product_system.product_system import ScalarProductSystem, CovariantRep, make_system


# --------------------------
# Schemas
# --------------------------

MATRIX_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["rows", "cols", "data"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "data": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
    "additionalProperties": False,
}

KRAUS_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["d", "ops"],
    "properties": {
        "d": {"type": "integer", "minimum": 1},
        "ops": {"type": "array", "items": MATRIX_SCHEMA, "minItems": 1},
    },
}

FLIP_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["n", "m", "u"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "u": MATRIX_SCHEMA,
        "ordering": {"const": FLIP_ORDERING},
    },
}

SYSTEM_SCHEMA = FLIP_SCHEMA

REP_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["h", "T", "S"],
    "properties": {
        "h": {"type": "integer", "minimum": 1},
        "T": {"type": "array", "items": MATRIX_SCHEMA, "minItems": 1},
        "S": {"type": "array", "items": MATRIX_SCHEMA, "minItems": 1},
    },
}

PAIR_DOCUMENT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["theta", "phi"],
    "properties": {"theta": KRAUS_SCHEMA, "phi": KRAUS_SCHEMA, "description": {"type": "string"}},
}

REP_DOCUMENT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["system", "rep"],
    "properties": {"system": SYSTEM_SCHEMA, "rep": REP_SCHEMA, "description": {"type": "string"}},
}


def validate_document(doc: Any, schema: Dict[str, Any], name: str = "document"):
    errors = sorted(Draft7Validator(schema).iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        first = errors[0]
        path = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise InvalidInput(
            f"{name} violates its schema at {path}: {first.message}",
            identity="input_schema",
            context={"json_path": path, "errors": len(errors)},
        )


# --------------------------
# Matrices
# --------------------------

def encode_matrix(a) -> Dict[str, Any]:
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    rows, cols = a.shape
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def decode_matrix(doc: Dict[str, Any], name: str = "matrix") -> np.ndarray:
    validate_document(doc, MATRIX_SCHEMA, name)
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if len(data) != rows * cols:
        raise InvalidInput(
            f"{name} declares {rows}x{cols} but carries {len(data)} entries",
            identity="input_schema",
        )
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    if not np.all(np.isfinite(flat)):
        raise InvalidInput(f"{name} has non-finite entries", identity="input_schema")
    return flat.reshape(rows, cols)


# --------------------------
# Domain objects
# --------------------------

def decode_kraus(doc: Dict[str, Any], name: str = "kraus") -> KrausFamily:
    validate_document(doc, KRAUS_SCHEMA, name)
    ops = [decode_matrix(op, f"{name}.ops[{k}]") for k, op in enumerate(doc["ops"])]
    return KrausFamily(d=doc["d"], ops=ops)


def encode_flip(flip: FlipUnitary) -> Dict[str, Any]:
    return {"n": flip.n, "m": flip.m, "u": encode_matrix(flip.u), "ordering": flip.ordering}


def encode_system(sys: ScalarProductSystem) -> Dict[str, Any]:
    return encode_flip(sys.flip)


def decode_system(doc: Dict[str, Any], name: str = "system") -> ScalarProductSystem:
    validate_document(doc, SYSTEM_SCHEMA, name)
    return make_system(doc["n"], doc["m"], decode_matrix(doc["u"], f"{name}.u"))


def encode_rep(rep: CovariantRep) -> Dict[str, Any]:
    return {"h": rep.h, "T": [encode_matrix(x) for x in rep.T], "S": [encode_matrix(x) for x in rep.S]}


def decode_rep(doc: Dict[str, Any], name: str = "rep") -> CovariantRep:
    validate_document(doc, REP_SCHEMA, name)
    T = [decode_matrix(x, f"{name}.T[{k}]") for k, x in enumerate(doc["T"])]
    S = [decode_matrix(x, f"{name}.S[{k}]") for k, x in enumerate(doc["S"])]
    return CovariantRep(h=doc["h"], T=T, S=S)


# --------------------------
# Input documents
# --------------------------

def decode_pair_document(doc: Dict[str, Any]) -> Tuple[KrausFamily, KrausFamily]:
    validate_document(doc, PAIR_DOCUMENT_SCHEMA, "pair document")
    return decode_kraus(doc["theta"], "theta"), decode_kraus(doc["phi"], "phi")


def decode_rep_document(doc: Dict[str, Any]) -> Tuple[ScalarProductSystem, CovariantRep]:
    validate_document(doc, REP_DOCUMENT_SCHEMA, "representation document")
    return decode_system(doc["system"]), decode_rep(doc["rep"])


def encode_rep_document(sys: ScalarProductSystem, rep: CovariantRep, description: str | None = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {}
    if description:
        doc["description"] = description
    doc["system"] = encode_system(sys)
    doc["rep"] = encode_rep(rep)
    return doc


def encode_matrices(mats) -> List[Dict[str, Any]]:
    return [encode_matrix(m) for m in mats]
