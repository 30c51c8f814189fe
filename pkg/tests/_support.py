"""Shared builders for the test modules: random structures and defect injections."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from itertools import product as cartesian

from hptk.coalgebra import AInftyStructure, LInftyStructure, antisym_sort
from hptk.document import corpus_text, parse
from hptk.graded import GradedSpace


def random_structure(rng: random.Random, kind: str, arity: int = 3, density: float = 0.4):
    """Random A-infinity ('a') or L-infinity ('l') data, dim <= 3, arity <= 3."""
    dim = rng.randint(1, 3)
    degs = [rng.randint(-1, 2) for _ in range(dim)]
    sp = GradedSpace(tuple((f"v{i}", d) for i, d in enumerate(degs)))
    maps = {}
    for k in range(1, arity + 1):
        for w in cartesian(range(dim), repeat=k):
            if kind == "l":
                s, cw = antisym_sort(w, degs)
                if cw != w or not s:
                    continue
            want = sum(degs[x] for x in w) + 2 - k
            for t in sp.in_degree(want):
                if rng.random() < density:
                    maps.setdefault(w, {})[t] = Fraction(rng.randint(-2, 2))
    cls = AInftyStructure if kind == "a" else LInftyStructure
    return cls(sp, maps, arity)


def corpus_data(name: str) -> dict:
    return json.loads(corpus_text(name))


def _entry(entries, **match):
    for e in entries:
        if all(e[k] == v for k, v in match.items()):
            return e
    raise KeyError(match)


def inject(name: str) -> tuple:
    """One single-entry defect per corpus model.

    Returns ``(document, law, witness inputs)`` where the witness is the basis
    tuple the validator must report for the named law.
    """
    data = corpus_data(name)
    if name == "T2":
        _entry(data["product"], left="1", right="x")["result"] = [{"basis": "y", "coef": "1"}]
        law, wit = "unit_left", ("x",)
    elif name == "D2":
        data["product"] = [{"left": "x", "right": "x", "result": [{"basis": "x", "coef": "1"}]}]
        law, wit = "d_leibniz", ("x", "x")
    elif name == "H3CE":
        data["differential"].append({"arg": "ac", "result": [{"basis": "abc", "coef": "1"}]})
        law, wit = "d_leibniz", ("a", "c")
    elif name == "H3GBV":
        data["bv_operator"]["entries"].append({"arg": "e3", "result": [{"basis": "1", "coef": "1"}]})
        law, wit = "delta_squared", ("e1e2",)
    elif name == "MAT2":
        _entry(data["bracket"]["entries"], left="E12", right="E21")["result"] = [{"basis": "I", "coef": "1"}]
        law, wit = "antisymmetry", ("E12", "E21")
    else:
        raise KeyError(name)
    return parse(json.dumps(data)), law, wit
