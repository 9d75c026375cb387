"""JSON wire format.

Rationals travel as "num/den" strings (den > 0, lowest terms, always with a
slash), vertices as integer arrays.  ``dumps`` is the canonical encoding:
decoding and re-encoding canonical text gives the same bytes.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .combinatorics import Approximation, check_seq, check_vertex
from .dual import Functional
from .norm import AdmissibleFamily, Leaf, Node
from .space import T_A, T_K, Params, Vector

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


class CodecError(ValueError):
    pass


def rational_to_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise CodecError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise CodecError(f"rational must be a 'num/den' string, got {text!r}")
    m = _RATIONAL.match(text)
    if not m:
        raise CodecError(f"not a rational: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise CodecError("zero denominator")
    return Fraction(int(m.group(1)), den)


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodecError(f"invalid JSON: {exc}") from exc


def _vertex(data, k=None) -> tuple:
    if not isinstance(data, list) or not all(isinstance(e, int) and not isinstance(e, bool)
                                             for e in data):
        raise CodecError(f"vertex must be an integer array, got {data!r}")
    try:
        return check_vertex(data, len(data) if k is None else k)
    except ValueError as exc:
        raise CodecError(str(exc)) from exc


def _seq(data, k) -> tuple:
    if not isinstance(data, list):
        raise CodecError(f"sequence must be an integer array, got {data!r}")
    try:
        return check_seq(data, k)
    except ValueError as exc:
        raise CodecError(str(exc)) from exc


def _need(data, key, kind=None):
    if not isinstance(data, dict) or key not in data:
        raise CodecError(f"missing field {key!r}")
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise CodecError(f"field {key!r} has the wrong type")
    return value


# -- vectors and params -----------------------------------------------------


def vector_to_json(x: Vector) -> dict:
    return {"k": x.k, "coords": [{"v": list(v), "a": rational_to_str(a)} for v, a in x.coords]}


def vector_from_json(data) -> Vector:
    k = _need(data, "k", int)
    if k < 1:
        raise CodecError("k must be >= 1")
    coords = {}
    for item in _need(data, "coords", list):
        v = _vertex(_need(item, "v"), k)
        if v in coords:
            raise CodecError(f"vertex {list(v)} listed twice")
        coords[v] = parse_rational(_need(item, "a"))
    return Vector.from_mapping(k, coords)


_VARIANT_NAMES = {"t_k": T_K, "tk": T_K, "t_a": T_A, "ta": T_A}


def parse_variant(name: str) -> str:
    try:
        return _VARIANT_NAMES[str(name).lower()]
    except KeyError:
        raise CodecError(f"unknown variant {name!r}; use T_k or T_A") from None


def params_to_json(p: Params) -> dict:
    return {"k": p.k, "d": p.d, "theta": rational_to_str(p.theta), "variant": p.variant}


def params_from_json(data) -> Params:
    try:
        return Params(_need(data, "k", int), _need(data, "d", int),
                      parse_rational(_need(data, "theta")),
                      parse_variant(data.get("variant", T_K)))
    except (TypeError, ValueError) as exc:
        raise CodecError(str(exc)) from exc


# -- approximations and certificates ----------------------------------------


def approximation_to_json(a: Approximation) -> dict:
    return {"set": [list(v) for v in a.members],
            "witness": [{"s": list(s), "x": list(x)} for s, x in a.witness]}


def approximation_from_json(data) -> Approximation:
    members = tuple(_vertex(v) for v in _need(data, "set", list))
    if not members:
        raise CodecError("empty approximation")
    k = len(members[0])
    witness = tuple((_seq(_need(w, "s"), k), _seq(_need(w, "x"), k))
                    for w in _need(data, "witness", list))
    return Approximation(members, witness)


def certificate_to_json(cert) -> dict:
    if isinstance(cert, Leaf):
        return {"leaf": None if cert.vertex is None else list(cert.vertex),
                "value": rational_to_str(cert.value)}
    fam = cert.family
    return {
        "family": {
            "blocks": [approximation_to_json(b) for b in fam.blocks],
            "separators": None if fam.separators is None else [list(s) for s in fam.separators],
        },
        "children": [certificate_to_json(c) for c in cert.children],
        "value": rational_to_str(cert.value),
    }


def certificate_from_json(data):
    value = parse_rational(_need(data, "value"))
    if "leaf" in data:
        leaf = data["leaf"]
        return Leaf(None if leaf is None else _vertex(leaf), value)
    fam = _need(data, "family", dict)
    blocks = tuple(approximation_from_json(b) for b in _need(fam, "blocks", list))
    seps = fam.get("separators")
    if seps is not None:
        seps = tuple(_vertex(s) for s in seps)
    children = tuple(certificate_from_json(c) for c in _need(data, "children", list))
    return Node(AdmissibleFamily(blocks, seps), children, value)


def functional_to_json(f: Functional) -> dict:
    out = vector_to_json(f.vector)
    out["depth"] = f.depth
    return out


def functional_from_json(data) -> Functional:
    return Functional(vector_from_json(data), _need(data, "depth", int))


def vertex_arg(text: str) -> tuple:
    """Parse "0,2,7" or "[0,2,7]" from the command line."""
    text = text.strip()
    if text.startswith("["):
        return _vertex(loads(text))
    if text in ("", "()"):
        return ()
    try:
        return tuple(int(e) for e in text.strip("()").split(","))
    except ValueError:
        raise CodecError(f"not a sequence: {text!r}") from None
