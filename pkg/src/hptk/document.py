"""Algebra documents: strict JSON text <-> :class:`AlgebraPresentation`.

The canonical serialization is ``json.dumps(..., sort_keys=True, indent=2)``
with structure-constant lists in basis order, so a document that round-trips
through parse and serialize is byte-stable and its digest is meaningful.
Coefficients are strings ``"p"`` or ``"p/q"`` in lowest terms with ``q > 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, List, Optional, Tuple

import jsonschema

from .algebra import AlgebraPresentation, Bracket
from .graded import GradedMap, GradedSpace

MONOMIAL = "monomial-orthonormal"


@dataclass(frozen=True)
class DocumentError:
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


class ParseError(ValueError):
    def __init__(self, errors: List[DocumentError]):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


@lru_cache(maxsize=None)
def schema() -> dict:
    text = resources.files("hptk").joinpath("schema/algebra_document.schema.json").read_text("utf-8")
    return json.loads(text)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_coef(text: str) -> Fraction:
    """Exact coefficient; refuses anything that is not in canonical form."""
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed coefficient {text!r}") from None
    if format_coef(value) != text:
        raise ValueError(f"coefficient {text!r} is not in lowest terms (expected {format_coef(value)!r})")
    if value == 0:
        raise ValueError("zero coefficients must be omitted")
    return value


def format_coef(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass
class AlgebraDocument:
    """Validated document, kept in its JSON form."""

    data: Dict[str, Any]

    @property
    def name(self) -> str:
        return self.data["name"]

    def serialize(self) -> str:
        return serialize(self.data)

    def presentation(self) -> AlgebraPresentation:
        return to_presentation(self.data)


def serialize(data: Dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse(text: str) -> AlgebraDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError([DocumentError(f"line {exc.lineno}, column {exc.colno}", exc.msg)]) from None
    validator = jsonschema.Draft202012Validator(schema())
    errs = sorted(validator.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errs:
        raise ParseError([DocumentError(_path(e.absolute_path), e.message) for e in errs])
    errors = _semantic_errors(data)
    if errors:
        raise ParseError(errors)
    return AlgebraDocument(canonical_data(data))


def _semantic_errors(data) -> List[DocumentError]:
    errors: List[DocumentError] = []
    degrees: Dict[str, int] = {}
    for k, b in enumerate(data["basis"]):
        if b["symbol"] in degrees:
            errors.append(DocumentError(_path(["basis", k, "symbol"]), f"duplicate symbol {b['symbol']!r}"))
        degrees[b["symbol"]] = b["degree"]

    def sym(path, s) -> Optional[int]:
        if s not in degrees:
            errors.append(DocumentError(_path(path), f"unknown symbol {s!r}"))
            return None
        return degrees[s]

    def result(path, terms, expected: Optional[int]):
        seen = set()
        for t, term in enumerate(terms):
            p = path + ["result", t]
            try:
                parse_coef(term["coef"])
            except ValueError as exc:
                errors.append(DocumentError(_path(p + ["coef"]), str(exc)))
            d = sym(p + ["basis"], term["basis"])
            if term["basis"] in seen:
                errors.append(DocumentError(_path(p + ["basis"]), f"repeated basis {term['basis']!r}"))
            seen.add(term["basis"])
            if d is not None and expected is not None and d != expected:
                errors.append(DocumentError(
                    _path(p + ["basis"]),
                    f"degree mismatch: {term['basis']!r} has degree {d}, expected {expected}",
                ))

    def binary(section, entries, extra):
        keys = set()
        for n, e in enumerate(entries):
            p = [*section, n]
            dl = sym(p + ["left"], e["left"])
            dr = sym(p + ["right"], e["right"])
            if (e["left"], e["right"]) in keys:
                errors.append(DocumentError(_path(p), "duplicate entry"))
            keys.add((e["left"], e["right"]))
            exp = None if dl is None or dr is None else dl + dr + extra
            result(p, e["result"], exp)

    def unary(section, entries, degree):
        keys = set()
        for n, e in enumerate(entries):
            p = [*section, n]
            da = sym(p + ["arg"], e["arg"])
            if e["arg"] in keys:
                errors.append(DocumentError(_path(p), "duplicate entry"))
            keys.add(e["arg"])
            result(p, e["result"], None if da is None else da + degree)

    if "unit" in data:
        d = sym(["unit"], data["unit"])
        if d not in (None, 0):
            errors.append(DocumentError("$.unit", f"unit must have degree 0, not {d}"))
    binary(["product"], data.get("product", []), 0)
    unary(["differential"], data.get("differential", []), 1)
    br = data.get("bracket")
    if br is not None:
        deg = br.get("degree", 0)
        if br["shift"] == 0 and deg != 0:
            errors.append(DocumentError("$.bracket.degree", "a shift 0 bracket must have degree 0"))
        binary(["bracket", "entries"], br["entries"], deg)
    bv = data.get("bv_operator")
    if bv is not None:
        unary(["bv_operator", "entries"], bv["entries"], bv["degree"])
    ip = data.get("inner_product")
    if isinstance(ip, dict):
        dims: Dict[int, int] = {}
        for d in degrees.values():
            dims[d] = dims.get(d, 0) + 1
        seen = set()
        for n, blk in enumerate(ip["blocks"]):
            p = ["inner_product", "blocks", n]
            if blk["degree"] in seen:
                errors.append(DocumentError(_path(p), "duplicate degree block"))
            seen.add(blk["degree"])
            size = dims.get(blk["degree"], 0)
            m = blk["matrix"]
            if len(m) != size or any(len(row) != size for row in m):
                errors.append(DocumentError(_path(p + ["matrix"]), f"expected a {size}x{size} matrix"))
                continue
            for r, row in enumerate(m):
                for c, x in enumerate(row):
                    if x != "0":
                        try:
                            parse_coef(x)
                        except ValueError as exc:
                            errors.append(DocumentError(_path(p + ["matrix", r, c]), str(exc)))
        missing = sorted(set(dims) - seen)
        if missing:
            errors.append(DocumentError("$.inner_product.blocks", f"missing degree blocks {missing}"))
    return errors


def canonical_data(data) -> Dict[str, Any]:
    """Sort entry lists by basis order; drop empty optional sections."""
    order = {b["symbol"]: i for i, b in enumerate(data["basis"])}

    def res(terms):
        return sorted(({"basis": t["basis"], "coef": t["coef"]} for t in terms), key=lambda t: order[t["basis"]])

    def binary(entries):
        out = [{"left": e["left"], "right": e["right"], "result": res(e["result"])} for e in entries if e["result"]]
        return sorted(out, key=lambda e: (order[e["left"]], order[e["right"]]))

    def unary(entries):
        out = [{"arg": e["arg"], "result": res(e["result"])} for e in entries if e["result"]]
        return sorted(out, key=lambda e: order[e["arg"]])

    out: Dict[str, Any] = {
        "name": data["name"],
        "scalars": "rational",
        "basis": [{"symbol": b["symbol"], "degree": b["degree"]} for b in data["basis"]],
    }
    if "unit" in data:
        out["unit"] = data["unit"]
    if data.get("product"):
        out["product"] = binary(data["product"])
    if data.get("differential"):
        out["differential"] = unary(data["differential"])
    if "bracket" in data:
        br = data["bracket"]
        out["bracket"] = {"shift": br["shift"], "degree": br.get("degree", 0), "entries": binary(br["entries"])}
    if "bv_operator" in data:
        bv = data["bv_operator"]
        out["bv_operator"] = {"degree": bv["degree"], "entries": unary(bv["entries"])}
    if "inner_product" in data:
        ip = data["inner_product"]
        if isinstance(ip, dict):
            ip = {"blocks": sorted(({"degree": b["degree"], "matrix": b["matrix"]} for b in ip["blocks"]),
                                   key=lambda b: b["degree"])}
        out["inner_product"] = ip
    return out


def _vec(space: GradedSpace, terms) -> Dict[int, Fraction]:
    return {space.index(t["basis"]): parse_coef(t["coef"]) for t in terms}


def to_presentation(data) -> AlgebraPresentation:
    space = GradedSpace(tuple((b["symbol"], b["degree"]) for b in data["basis"]))
    product = {(space.index(e["left"]), space.index(e["right"])): _vec(space, e["result"])
               for e in data.get("product", [])}
    diff = None
    if data.get("differential"):
        diff = GradedMap(space, space, 1, {space.index(e["arg"]): _vec(space, e["result"])
                                           for e in data["differential"]})
    unit = space.index(data["unit"]) if "unit" in data else None
    bracket = None
    if "bracket" in data:
        br = data["bracket"]
        bracket = Bracket({(space.index(e["left"]), space.index(e["right"])): _vec(space, e["result"])
                           for e in br["entries"]}, br["shift"], br.get("degree", 0))
    bv = None
    if "bv_operator" in data:
        b = data["bv_operator"]
        bv = GradedMap(space, space, b["degree"], {space.index(e["arg"]): _vec(space, e["result"])
                                                   for e in b["entries"]})
    gram = None
    ip = data.get("inner_product")
    if isinstance(ip, dict):
        gram = {blk["degree"]: [[Fraction(x) for x in row] for row in blk["matrix"]] for blk in ip["blocks"]}
    return AlgebraPresentation(space, product, diff, unit, bracket, bv, name=data["name"], gram=gram)


def _terms(space: GradedSpace, vec) -> List[Dict[str, str]]:
    return [{"basis": space.symbol(k), "coef": format_coef(c)} for k, c in sorted(vec.items()) if c]


def from_presentation(p: AlgebraPresentation, inner_product: Optional[str] = None) -> AlgebraDocument:
    sp = p.space
    data: Dict[str, Any] = {
        "name": p.name or "unnamed",
        "scalars": "rational",
        "basis": [{"symbol": s, "degree": d} for s, d in sp.basis],
    }
    if p.unit is not None:
        data["unit"] = sp.symbol(p.unit)
    data["product"] = [{"left": sp.symbol(i), "right": sp.symbol(j), "result": _terms(sp, v)}
                       for (i, j), v in sorted(p.product.items())]
    if p.differential is not None:
        data["differential"] = [{"arg": sp.symbol(j), "result": _terms(sp, p.differential.column(j))}
                                for j in range(sp.dim)]
    if p.bracket is not None:
        data["bracket"] = {
            "shift": p.bracket.shift,
            "degree": p.bracket.degree,
            "entries": [{"left": sp.symbol(i), "right": sp.symbol(j), "result": _terms(sp, v)}
                        for (i, j), v in sorted(p.bracket.entries.items())],
        }
    if p.bv_operator is not None:
        data["bv_operator"] = {
            "degree": p.bv_operator.degree,
            "entries": [{"arg": sp.symbol(j), "result": _terms(sp, p.bv_operator.column(j))}
                        for j in range(sp.dim)],
        }
    if inner_product is not None:
        data["inner_product"] = inner_product
    return AlgebraDocument(canonical_data(data))


def corpus_names() -> List[str]:
    folder = resources.files("hptk").joinpath("corpus")
    return sorted(f.name[:-5] for f in folder.iterdir() if f.name.endswith(".json"))


def corpus_text(name: str) -> str:
    path = resources.files("hptk").joinpath(f"corpus/{name}.json")
    if not path.is_file():
        raise FileNotFoundError(f"no corpus model named {name!r}")
    return path.read_text("utf-8")


def load_text(ref: str) -> Tuple[str, str]:
    """``@NAME`` reads a shipped corpus model; anything else is a file path."""
    if ref.startswith("@"):
        return ref, corpus_text(ref[1:])
    with open(ref, "r", encoding="utf-8") as fh:
        return ref, fh.read()
