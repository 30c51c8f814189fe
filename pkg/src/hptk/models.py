"""Builders for the small model algebras shipped in the corpus.

Exterior algebras on odd generators with a differential prescribed on
generators, and 2x2 matrices with coefficients in an exterior algebra on one
degree-1 generator. The corpus JSON files are generated from these, so the
tests can compare a parsed document against an independent construction.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraPresentation, Bracket
from .graded import GradedMap, GradedSpace, sort_sign
from .linalg import axpy

Monomial = Tuple[int, ...]


def _monomials(n: int) -> List[Monomial]:
    out: List[Monomial] = []
    for k in range(n + 1):
        out.extend(combinations(range(n), k))
    return out


def _symbol(names: Sequence[str], mono: Monomial) -> str:
    return "".join(names[i] for i in mono) if mono else "1"


class Exterior:
    """Free graded-commutative algebra on odd generators, basis = subsets."""

    def __init__(self, gens: Sequence[Tuple[str, int]]):
        for name, deg in gens:
            if deg % 2 == 0:
                raise ValueError(f"generator {name!r} must have odd degree")
        self.names = [g for g, _ in gens]
        self.gdeg = [d for _, d in gens]
        self.monos = _monomials(len(gens))
        self.index = {m: i for i, m in enumerate(self.monos)}
        self.space = GradedSpace(tuple(
            (_symbol(self.names, m), sum(self.gdeg[i] for i in m)) for m in self.monos
        ))

    def mono(self, text: str) -> int:
        return self.space.index(text)

    def times(self, i: int, j: int) -> Dict[int, Fraction]:
        sgn, word = sort_sign(self.monos[i] + self.monos[j], self.gdeg)
        if not sgn:
            return {}
        return {self.index[word]: Fraction(sgn)}

    def product(self) -> Dict[Tuple[int, int], Dict[int, Fraction]]:
        n = len(self.monos)
        out = {}
        for i in range(n):
            for j in range(n):
                v = self.times(i, j)
                if v:
                    out[(i, j)] = v
        return out

    def derivation(self, on_gens: Dict[str, Dict[str, Fraction]], degree: int) -> GradedMap:
        """Extend generator images to a derivation of the given degree."""
        gen_img = {self.names.index(g): {self.mono(k): Fraction(c) for k, c in v.items()}
                   for g, v in on_gens.items()}
        cols = {}
        for j, m in enumerate(self.monos):
            out: Dict[int, Fraction] = {}
            pre_deg = 0
            for pos, g in enumerate(m):
                img = gen_img.get(g)
                if img:
                    s = -1 if (degree * pre_deg) % 2 else 1
                    left = self.index[m[:pos]]
                    right = self.index[m[pos + 1:]]
                    for k, c in img.items():
                        # left * img * right
                        t = {}
                        for a, ca in self.times(left, k).items():
                            axpy(t, self.times(a, right), ca)
                        axpy(out, t, s * c)
                pre_deg += self.gdeg[g]
            if out:
                cols[j] = out
        return GradedMap(self.space, self.space, degree, cols)


def exterior_model(
    name: str,
    gens: Sequence[Tuple[str, int]],
    differential: Optional[Dict[str, Dict[str, Fraction]]] = None,
) -> AlgebraPresentation:
    ext = Exterior(gens)
    d = ext.derivation(differential, 1) if differential else None
    return AlgebraPresentation(ext.space, ext.product(), d, ext.index[()], name=name)


def t2() -> AlgebraPresentation:
    return exterior_model("T2", [("x", 1), ("y", 1)])


def d2() -> AlgebraPresentation:
    sp = GradedSpace((("x", 0), ("y", 1)))
    d = GradedMap(sp, sp, 1, {0: {1: Fraction(1)}})
    return AlgebraPresentation(sp, {}, d, None, name="D2")


def h3ce() -> AlgebraPresentation:
    return exterior_model("H3CE", [("a", 1), ("b", 1), ("c", 1)], {"c": {"ab": 1}})


def h3gbv() -> AlgebraPresentation:
    ext = Exterior([("e1", -1), ("e2", -1), ("e3", -1)])
    bv = GradedMap(ext.space, ext.space, 1, {ext.mono("e1e2"): {ext.mono("e3"): Fraction(1)}})
    return AlgebraPresentation(ext.space, ext.product(), None, ext.index[()],
                               bv_operator=bv, name="H3GBV")


def theta_counterexample() -> AlgebraPresentation:
    """Second-order condition fails: Delta(t1 t2) = 1 on an exterior algebra."""
    ext = Exterior([("t1", 1), ("t2", 1)])
    bv = GradedMap(ext.space, ext.space, -2, {ext.mono("t1t2"): {ext.mono("1"): Fraction(1)}})
    return AlgebraPresentation(ext.space, ext.product(), None, ext.index[()],
                               bv_operator=bv, name="THETA")


# -- 2x2 matrices over Lambda(xi) ---------------------------------------------

_MAT_BASIS = {
    "I": ((1, 0), (0, 1)),
    "E12": ((0, 1), (0, 0)),
    "E21": ((0, 0), (1, 0)),
    "H": ((1, 0), (0, -1)),
}


def _matmul(x, y):
    return tuple(
        tuple(sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def _coords(m) -> Dict[str, Fraction]:
    (p, q), (r, s) = m
    out = {"I": Fraction(p + s, 2), "H": Fraction(p - s, 2), "E12": Fraction(q), "E21": Fraction(r)}
    return {k: v for k, v in out.items() if v}


def mat2() -> AlgebraPresentation:
    """Lambda(xi) (x) M_2 with the graded commutator bracket and d = [xi E12, -]."""
    names = list(_MAT_BASIS)
    basis = [(n, 0) for n in names] + [("xi" + n, 1) for n in names]
    sp = GradedSpace(tuple(basis))
    prod: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for a in range(2):
        for b in range(2):
            if a + b > 1:
                continue
            for x in names:
                for y in names:
                    v = _coords(_matmul(_MAT_BASIS[x], _MAT_BASIS[y]))
                    i = sp.index(("xi" if a else "") + x)
                    j = sp.index(("xi" if b else "") + y)
                    pre = "xi" if a + b else ""
                    prod[(i, j)] = {sp.index(pre + k): c for k, c in v.items()}
    p = AlgebraPresentation(sp, prod, None, sp.index("I"), name="MAT2")
    entries = {}
    for i in range(sp.dim):
        for j in range(sp.dim):
            v = p.mul({i: 1}, {j: 1})
            axpy(v, p.mul({j: 1}, {i: 1}), -(-1) ** (sp.degree(i) * sp.degree(j)))
            if v:
                entries[(i, j)] = v
    nil = sp.index("xiE12")
    cols = {}
    for j in range(sp.dim):
        v = dict(entries.get((nil, j), {}))
        if v:
            cols[j] = v
    d = GradedMap(sp, sp, 1, cols)
    return AlgebraPresentation(sp, prod, d, sp.index("I"), Bracket(entries, 0, 0), name="MAT2")


CORPUS = {"T2": t2, "D2": d2, "H3CE": h3ce, "H3GBV": h3gbv, "MAT2": mat2}
