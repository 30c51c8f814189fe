"""Exact sparse linear algebra over Q.

A sparse vector is a ``dict`` from a sortable key to a nonzero ``Fraction``.
Pivoting is deterministic: the pivot of a vector is its smallest key, so all
outputs depend only on the key order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vec = Dict[Hashable, Fraction]


def axpy(target: Vec, vec: Vec, coef=1) -> Vec:
    """``target += coef * vec`` in place; returns ``target``."""
    if not coef:
        return target
    for k, v in vec.items():
        s = target.get(k, 0) + coef * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)
    return target


def add_term(target: Vec, key, coef) -> None:
    if not coef:
        return
    s = target.get(key, 0) + coef
    if s:
        target[key] = s
    else:
        target.pop(key, None)


def scale(vec: Vec, coef) -> Vec:
    if not coef:
        return {}
    return {k: coef * v for k, v in vec.items()}


def combine(*pairs: Tuple[object, Vec]) -> Vec:
    out: Vec = {}
    for c, v in pairs:
        axpy(out, v, c)
    return out


def sub(a: Vec, b: Vec) -> Vec:
    return axpy(dict(a), b, -1)


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class NotInImage:
    """Outcome marker for a target outside the image of a matrix."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_IN_IMAGE"

    def __bool__(self) -> bool:
        return False


NOT_IN_IMAGE = NotInImage()


class Reducer:
    """Incremental echelon basis of a subspace with preimage tracking.

    Each added vector carries a *tag* vector (its expression in some source
    coordinates). Reducing a target against the basis yields the remainder and
    the tag combination that produced the eliminated part.
    """

    def __init__(self):
        self.pivots: Dict[Hashable, Tuple[Vec, Vec]] = {}
        self._order: List[Hashable] = []

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Vec, tag: Optional[Vec] = None) -> Tuple[Vec, Vec]:
        vec = dict(vec)
        tag = dict(tag) if tag is not None else {}
        while vec:
            hit = None
            for k in sorted(vec):
                if k in self.pivots:
                    hit = k
                    break
            if hit is None:
                break
            pv, pt = self.pivots[hit]
            c = vec[hit]
            axpy(vec, pv, -c)
            axpy(tag, pt, -c)
        return vec, tag

    def add(self, vec: Vec, tag: Optional[Vec] = None) -> Optional[Hashable]:
        """Insert; returns the new pivot key or ``None`` if dependent.

        When dependent, the reduced tag (a relation) is available from
        :meth:`reduce`.
        """
        rem, t = self.reduce(vec, tag)
        if not rem:
            return None
        p = min(rem)
        c = rem[p]
        rem = {k: v / c for k, v in rem.items()}
        t = {k: v / c for k, v in t.items()}
        # keep rows fully reduced: eliminate p from earlier rows
        for q, (qv, qt) in self.pivots.items():
            if p in qv:
                d = qv[p]
                axpy(qv, rem, -d)
                axpy(qt, t, -d)
        self.pivots[p] = (rem, t)
        self._order.append(p)
        return p

    def contains(self, vec: Vec) -> bool:
        return not self.reduce(vec)[0]

    def basis(self) -> List[Vec]:
        """Reduced echelon basis ordered by pivot."""
        return [dict(self.pivots[p][0]) for p in sorted(self.pivots)]

    def pivot_keys(self) -> List[Hashable]:
        return sorted(self.pivots)


@dataclass
class SolveResult:
    kernel: List[Vec]
    image: List[Vec]
    preimages: List[object]
    rank: int


def solve_exact(columns: Sequence[Vec], targets: Iterable[Vec] = ()) -> SolveResult:
    """Kernel, image and preimages for the matrix whose j-th column is ``columns[j]``.

    Kernel vectors are over column indices, image vectors over row keys; both
    are in reduced echelon form. Each entry of ``preimages`` is an exact
    preimage or :data:`NOT_IN_IMAGE`.
    """
    img = Reducer()
    relations = Reducer()
    for j, col in enumerate(columns):
        if img.add(col, {j: Fraction(1)}) is None:
            _, rel = img.reduce(col, {j: Fraction(1)})
            relations.add(rel)
    preimages = []
    for t in targets:
        rem, tag = img.reduce(t)
        preimages.append(NOT_IN_IMAGE if rem else {k: -v for k, v in tag.items()})
    return SolveResult(relations.basis(), img.basis(), preimages, len(img))


def rank(columns: Sequence[Vec]) -> int:
    r = Reducer()
    for c in columns:
        r.add(c)
    return len(r)


def invert_square(columns: Sequence[Vec], keys: Sequence[Hashable]) -> List[Vec]:
    """Inverse of a square matrix given by columns over row ``keys``.

    ``result[i]`` holds coefficients ``c`` (over column indices) with
    ``sum_j c[j] * columns[j]`` equal to the unit vector at ``keys[i]``.
    """
    r = Reducer()
    for j, col in enumerate(columns):
        if r.add(col, {j: Fraction(1)}) is None:
            raise ValueError("matrix is singular")
    out = []
    for k in keys:
        rem, tag = r.reduce({k: Fraction(1)})
        assert not rem
        out.append({j: -v for j, v in tag.items()})
    return out


def dense_det(rows: List[List[Fraction]]) -> Fraction:
    """Exact determinant by fraction-valued elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det
