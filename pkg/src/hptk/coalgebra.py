"""Tensor and symmetric coalgebras, coderivations, and the A∞ / L∞ dictionaries.

Conventions used throughout this module:

* ``V`` is the space carrying ``m_n`` or ``l_n``; ``W`` is its desuspension,
  with ``|w_i| = |v_i| - 1``. Indices of ``V`` and ``W`` coincide.
* A coderivation is stored by its corestrictions ``L_[k]``, keyed by words
  in ``W`` (canonical sorted words in the symmetric flavor).
* ``b_[k](w_1..w_k) = (-1)^{sum_j (k-j)|v_j|} m_k(v_1..v_k)`` (same rule for
  ``l_k``).
* The dual side ``X = W^t`` has generator degrees ``-|w_j|``; a derivation
  ``D`` of ``T(X)`` or ``S(X)`` matches a coderivation ``b`` through
  ``<D x, w> = (-1)^{|D||x|} <x, b w>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as cartesian
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import LawResult, StructureReport, WITNESS_LIMIT, Witness
from .graded import (
    SYMMETRIC,
    TENSOR,
    GradedSpace,
    WordAlgebra,
    koszul_permutation_sign,
    multiplicity_factor,
    permutation_parity,
    sort_sign,
)
from .linalg import Vec, add_term, axpy
from .parallel import pmap

Word = Tuple[int, ...]
Chain = Dict[Word, Fraction]


def sgn(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# unshuffles


def unshuffles(k: int, n: int) -> List[Tuple[Tuple[int, ...], int]]:
    """All ``(k, n)``-unshuffles as ``(sigma, sign)`` with 0-based ``sigma``.

    ``sigma[i]`` is the original position of the i-th output slot; the first
    ``k`` and the last ``n-k`` entries are increasing.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    out = []
    for head in combinations(range(n), k):
        tail = tuple(i for i in range(n) if i not in head)
        perm = head + tail
        out.append((perm, permutation_parity(perm)))
    return out


# ---------------------------------------------------------------------------
# coderivations


@dataclass
class Coderivation:
    degrees: List[int]
    flavor: str
    degree: int
    corestrictions: Dict[Word, Vec]
    max_arity: int

    def __post_init__(self):
        clean = {}
        for w, v in self.corestrictions.items():
            if not w:
                raise ValueError("L_[0] must vanish")
            if len(w) > self.max_arity:
                continue
            v = {i: Fraction(c) for i, c in v.items() if c}
            if not v:
                continue
            if self.flavor == SYMMETRIC:
                s, cw = sort_sign(w, self.degrees)
                if cw != tuple(w) or not s:
                    raise ValueError(f"symmetric corestriction keyed by non-canonical word {w}")
            want = sum(self.degrees[i] for i in w) + self.degree
            for i in v:
                if self.degrees[i] != want:
                    raise ValueError(f"corestriction on {w} is not homogeneous of degree {self.degree}")
            clean[tuple(w)] = v
        self.corestrictions = clean

    def core(self, word: Sequence[int]) -> Vec:
        """``L_[k]`` on an arbitrary (not necessarily canonical) word."""
        if not word or len(word) > self.max_arity:
            return {}
        if self.flavor == TENSOR:
            return self.corestrictions.get(tuple(word), {})
        s, cw = sort_sign(word, self.degrees)
        if not s:
            return {}
        v = self.corestrictions.get(cw)
        if not v:
            return {}
        return v if s == 1 else {k: -c for k, c in v.items()}

    def wdeg(self, word: Sequence[int]) -> int:
        return sum(self.degrees[i] for i in word)

    def canonical(self, word: Sequence[int]):
        if self.flavor == TENSOR:
            return 1, tuple(word)
        return sort_sign(word, self.degrees)


def extend_coderivation(c: Coderivation, word: Sequence[int]) -> Chain:
    """Value of the unique coderivation extension on one word."""
    word = tuple(word)
    n = len(word)
    out: Chain = {}
    if c.flavor == TENSOR:
        pre = 0
        for j in range(n):
            s = sgn(c.degree * pre)
            for i in range(1, n - j + 1):
                val = c.core(word[j:j + i])
                for k, coef in val.items():
                    add_term(out, word[:j] + (k,) + word[j + i:], s * coef)
            pre += c.degrees[word[j]]
        return out
    for s in range(1, n + 1):
        for perm, _ in unshuffles(s, n):
            eps = koszul_permutation_sign(perm, [c.degrees[x] for x in word])
            head = tuple(word[p] for p in perm[:s])
            tail = tuple(word[p] for p in perm[s:])
            for k, coef in c.core(head).items():
                sg, cw = sort_sign((k,) + tail, c.degrees)
                if sg:
                    add_term(out, cw, eps * sg * coef)
    return out


def extend_chain(c: Coderivation, chain: Chain) -> Chain:
    out: Chain = {}
    for w, a in chain.items():
        axpy(out, extend_coderivation(c, w), a)
    return out


def coderivation_square(c: Coderivation, words: Optional[Iterable[Word]] = None) -> Coderivation:
    """Corestrictions of ``c∘c``, computed by composition and by the
    corestriction formula; a mismatch raises with the offending word."""
    if c.degree % 2 == 0:
        raise ValueError("coderivation_square needs an odd coderivation")
    if words is None:
        words = all_words(c.degrees, c.flavor, c.max_arity)
    cores: Dict[Word, Vec] = {}
    for w in words:
        a = square_by_composition(c, w)
        b = square_by_formula(c, w)
        if a != b:
            raise AssertionError(f"coderivation square mismatch on word {w}: {a} != {b}")
        if a:
            cores[w] = a
    return Coderivation(c.degrees, c.flavor, 2 * c.degree, cores, c.max_arity)


def square_by_composition(c: Coderivation, word: Sequence[int]) -> Vec:
    out: Vec = {}
    for w, a in extend_coderivation(c, word).items():
        axpy(out, c.core(w), a)
    return out


def square_by_formula(c: Coderivation, word: Sequence[int]) -> Vec:
    word = tuple(word)
    n = len(word)
    out: Vec = {}
    if c.flavor == TENSOR:
        for s in range(1, n + 1):
            pre = 0
            for k in range(n - s + 1):
                sg = sgn(c.degree * pre)
                for x, a in c.core(word[k:k + s]).items():
                    axpy(out, c.core(word[:k] + (x,) + word[k + s:]), sg * a)
                pre += c.degrees[word[k]]
        return out
    degs = [c.degrees[x] for x in word]
    for s in range(1, n + 1):
        for perm, _ in unshuffles(s, n):
            eps = koszul_permutation_sign(perm, degs)
            head = tuple(word[p] for p in perm[:s])
            tail = tuple(word[p] for p in perm[s:])
            for x, a in c.core(head).items():
                axpy(out, c.core((x,) + tail), eps * a)
    return out


def all_words(degrees: Sequence[int], flavor: str, max_length: int, min_length: int = 1) -> List[Word]:
    alg = WordAlgebra(degrees, flavor, max_length)
    return [w for w in alg.words() if len(w) >= min_length]


# -- comultiplications ------------------------------------------------------


def comultiply(c: Coderivation, word: Sequence[int]) -> Dict[Tuple[Word, Word], Fraction]:
    """Deconcatenation (tensor) or unshuffle coproduct (symmetric)."""
    word = tuple(word)
    n = len(word)
    out: Dict[Tuple[Word, Word], Fraction] = {}
    if c.flavor == TENSOR:
        for i in range(n + 1):
            add_term(out, (word[:i], word[i:]), 1)
        return out
    degs = [c.degrees[x] for x in word]
    for i in range(n + 1):
        for perm, _ in unshuffles(i, n):
            eps = koszul_permutation_sign(perm, degs)
            left = tuple(word[p] for p in perm[:i])
            right = tuple(word[p] for p in perm[i:])
            s1, l1 = sort_sign(left, c.degrees)
            s2, r1 = sort_sign(right, c.degrees)
            if s1 and s2:
                add_term(out, (l1, r1), eps * s1 * s2)
    return out


def coderivation_defect(c: Coderivation, word: Sequence[int]) -> Dict[Tuple[Word, Word], Fraction]:
    """``Δ L - (L⊗1 + 1⊗L) Δ`` on one word."""
    out: Dict[Tuple[Word, Word], Fraction] = {}
    for w, a in extend_coderivation(c, word).items():
        for key, b in comultiply(c, w).items():
            add_term(out, key, a * b)
    for (l, r), a in comultiply(c, word).items():
        for w, b in extend_coderivation(c, l).items():
            add_term(out, (w, r), -a * b)
        s = sgn(c.degree * c.wdeg(l))
        for w, b in extend_coderivation(c, r).items():
            add_term(out, (l, w), -s * a * b)
    return out


# ---------------------------------------------------------------------------
# A∞ and L∞ structures


@dataclass
class AInftyStructure:
    """``maps[w]`` is ``m_{len(w)}`` on the basis word ``w`` of ``V``."""

    space: GradedSpace
    maps: Dict[Word, Vec]
    max_arity: int

    def __post_init__(self):
        clean = {}
        for w, v in self.maps.items():
            v = {i: Fraction(c) for i, c in v.items() if c}
            if not v:
                continue
            want = sum(self.space.degree(i) for i in w) + 2 - len(w)
            for i in v:
                if self.space.degree(i) != want:
                    raise ValueError(f"m_{len(w)} on {w} does not have degree {2 - len(w)}")
            clean[tuple(w)] = v
        self.maps = clean

    def m(self, word: Sequence[int]) -> Vec:
        return self.maps.get(tuple(word), {})

    def arity(self, n: int) -> Dict[Word, Vec]:
        return {w: v for w, v in self.maps.items() if len(w) == n}


def antisym_sort(word: Sequence[int], degrees: Sequence[int]) -> Tuple[int, Word]:
    """Sort with graded-antisymmetric signs; sign 0 if an even letter repeats."""
    items = list(word)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            a, b = items[j - 1], items[j]
            sign *= -sgn(degrees[a] * degrees[b])
            items[j - 1], items[j] = b, a
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b and degrees[a] % 2 == 0:
            return 0, tuple(items)
    return sign, tuple(items)


@dataclass
class LInftyStructure:
    """``maps[w]`` is ``l_{len(w)}`` on the sorted basis word ``w``."""

    space: GradedSpace
    maps: Dict[Word, Vec]
    max_arity: int

    def __post_init__(self):
        clean = {}
        degs = self.space.degrees
        for w, v in self.maps.items():
            v = {i: Fraction(c) for i, c in v.items() if c}
            if not v:
                continue
            s, cw = antisym_sort(w, degs)
            if cw != tuple(w) or not s:
                raise ValueError(f"l_{len(w)} keyed by non-canonical word {w}")
            want = sum(degs[i] for i in w) + 2 - len(w)
            for i in v:
                if degs[i] != want:
                    raise ValueError(f"l_{len(w)} on {w} does not have degree {2 - len(w)}")
            clean[tuple(w)] = v
        self.maps = clean

    def l(self, word: Sequence[int]) -> Vec:
        s, cw = antisym_sort(word, self.space.degrees)
        if not s:
            return {}
        v = self.maps.get(cw)
        if not v:
            return {}
        return v if s == 1 else {k: -c for k, c in v.items()}

    def arity(self, n: int) -> Dict[Word, Vec]:
        return {w: v for w, v in self.maps.items() if len(w) == n}


def _dictionary_sign(word: Sequence[int], degrees: Sequence[int]) -> int:
    k = len(word)
    return sgn(sum((k - 1 - j) * degrees[x] for j, x in enumerate(word)))


def desuspended_degrees(space: GradedSpace) -> List[int]:
    return [d - 1 for d in space.degrees]


def ainfty_to_codifferential(m: AInftyStructure) -> Coderivation:
    degs = m.space.degrees
    cores = {w: {k: _dictionary_sign(w, degs) * c for k, c in v.items()} for w, v in m.maps.items()}
    return Coderivation(desuspended_degrees(m.space), TENSOR, 1, cores, m.max_arity)


def codifferential_to_ainfty(b: Coderivation, space: GradedSpace) -> AInftyStructure:
    degs = space.degrees
    maps = {w: {k: _dictionary_sign(w, degs) * c for k, c in v.items()}
            for w, v in b.corestrictions.items()}
    return AInftyStructure(space, maps, b.max_arity)


def linfty_to_codifferential(l: LInftyStructure) -> Coderivation:
    degs = l.space.degrees
    cores = {w: {k: _dictionary_sign(w, degs) * c for k, c in v.items()} for w, v in l.maps.items()}
    return Coderivation(desuspended_degrees(l.space), SYMMETRIC, 1, cores, l.max_arity)


def codifferential_to_linfty(b: Coderivation, space: GradedSpace) -> LInftyStructure:
    degs = space.degrees
    maps = {w: {k: _dictionary_sign(w, degs) * c for k, c in v.items()}
            for w, v in b.corestrictions.items()}
    return LInftyStructure(space, maps, b.max_arity)


# -- identity checkers --------------------------------------------------------


def _multi(fn: Callable[[Word], Vec], args: Sequence[Vec]) -> Vec:
    out: Vec = {}
    for combo in cartesian(*[list(a.items()) for a in args]):
        coef = Fraction(1)
        for _, c in combo:
            coef *= c
        axpy(out, fn(tuple(k for k, _ in combo)), coef)
    return out


def stasheff_defect(m: AInftyStructure, word: Sequence[int]) -> Vec:
    """Left side of the Stasheff identity on ``v_1..v_n``."""
    return stasheff_sum(m.m, m.space.degree, word)


def stasheff_sum(m_fn: Callable[[tuple], Vec], degree: Callable, word: Sequence) -> Vec:
    """Stasheff sum for structure maps given as a callable on basis tuples."""
    word = tuple(word)
    n = len(word)
    out: Vec = {}
    for s in range(1, n + 1):
        r = n + 1 - s
        pre = 0
        for k in range(1, r + 1):
            inner = m_fn(word[k - 1:k - 1 + s])
            if inner:
                eps = (s + 1) * k + s * (n + pre)
                args = [{x: Fraction(1)} for x in word[:k - 1]] + [inner] + [
                    {x: Fraction(1)} for x in word[k - 1 + s:]
                ]
                axpy(out, _multi(m_fn, args), sgn(eps))
            pre += degree(word[k - 1])
    return out


def linfty_defect(l: LInftyStructure, word: Sequence[int], lada_markl: bool = True) -> Vec:
    """Generalized Jacobi sum on ``v_1..v_n``.

    With ``lada_markl`` the summand carries the extra ``(-1)^{s(r-1)}`` that
    makes the identity equivalent to ``b^2 = 0``; without it the bare form is
    evaluated (kept for comparison).
    """
    word = tuple(word)
    n = len(word)
    degs = [l.space.degree(x) for x in word]
    out: Vec = {}
    for s in range(1, n + 1):
        r = n + 1 - s
        for perm, parity in unshuffles(s, n):
            eps = parity * koszul_permutation_sign(perm, degs)
            if lada_markl:
                eps *= sgn(s * (r - 1))
            inner = l.l(tuple(word[p] for p in perm[:s]))
            if not inner:
                continue
            rest = [{word[p]: Fraction(1)} for p in perm[s:]]
            axpy(out, _multi(l.l, [inner] + rest), eps)
    return out


def _output_possible(space: GradedSpace, degree: int) -> bool:
    return bool(space.in_degree(degree))


def check_stasheff(m: AInftyStructure, arity: Optional[int] = None, threads=None) -> StructureReport:
    """Stasheff identities and ``b^2 = 0`` on every word up to ``arity``.

    Three laws per arity ``n``: the identity itself, the square of the
    associated coderivation, and agreement of the two verdicts per word.
    """
    arity = m.max_arity if arity is None else arity
    sp = m.space
    b = ainfty_to_codifferential(m)
    return _identity_report(
        sp, b, arity, TENSOR, lambda w: stasheff_defect(m, w), "stasheff", threads
    )


def check_linfty(l: LInftyStructure, arity: Optional[int] = None, threads=None) -> StructureReport:
    arity = l.max_arity if arity is None else arity
    sp = l.space
    b = linfty_to_codifferential(l)
    return _identity_report(
        sp, b, arity, SYMMETRIC, lambda w: linfty_defect(l, w), "jacobi", threads
    )


def _identity_report(sp, b, arity, flavor, defect, name, threads) -> StructureReport:
    laws: List[LawResult] = []
    degs = sp.degrees
    wdegs = desuspended_degrees(sp)
    for n in range(1, arity + 1):
        if flavor == TENSOR:
            words = list(cartesian(range(sp.dim), repeat=n))
        else:
            words = [w for w in all_words(wdegs, SYMMETRIC, n, n)]
        words = [w for w in words if _output_possible(sp, sum(degs[x] for x in w) + 3 - n)]

        def one(w):
            ident = defect(w)
            a = square_by_composition(b, w)
            f = square_by_formula(b, w)
            return ident, a, f

        results = pmap(one, words, threads)
        stats = {k: [0, []] for k in ("identity", "b_squared", "agree", "square_routes")}
        label = lambda w: tuple(sp.symbol(x) for x in w)
        named = lambda v: {sp.symbol(k): c for k, c in sorted(v.items())}
        for w, (ident, a, f) in zip(words, results):
            for key, bad, vec in (
                ("identity", bool(ident), ident),
                ("b_squared", bool(a), a),
                ("agree", bool(ident) != bool(a), ident or a),
                ("square_routes", a != f, axpy(dict(a), f, -1)),
            ):
                if bad:
                    stats[key][0] += 1
                    if len(stats[key][1]) < WITNESS_LIMIT:
                        stats[key][1].append(Witness(label(w), named(vec)))
        for key, (fails, wits) in stats.items():
            laws.append(LawResult(f"{name}_{key}_n{n}", len(words), fails, wits))
    return StructureReport(laws)


# ---------------------------------------------------------------------------
# derivations on the dual side and the pairing


@dataclass
class Derivation:
    """Derivation of ``T(X)`` or ``S(X)`` given by generator images.

    ``images[j]`` maps words (canonical for the symmetric flavor) to
    coefficients. Truncation drops every word longer than ``max_length``.
    """

    degrees: List[int]
    flavor: str
    degree: int
    images: Dict[int, Chain]
    max_length: int

    def __post_init__(self):
        self.algebra = WordAlgebra(self.degrees, self.flavor, self.max_length)
        clean = {}
        for j, img in self.images.items():
            img = {tuple(w): Fraction(c) for w, c in img.items() if c and len(w) <= self.max_length}
            for w in img:
                if self.algebra.degree(w) != self.degrees[j] + self.degree:
                    raise ValueError(f"image of generator {j} has wrong degree")
            if img:
                clean[j] = img
        self.images = clean

    def apply(self, chain: Chain) -> Chain:
        return self.algebra.apply_derivation_vec(self.images, self.degree, chain)

    def square_defect(self) -> Dict[int, Chain]:
        """``D^2`` on generators, modulo words longer than ``max_length``."""
        out = {}
        for j in range(len(self.degrees)):
            v = self.apply(self.images.get(j, {}))
            if v:
                out[j] = v
        return out

    def component(self, j: int, length: int) -> Chain:
        return {w: c for w, c in self.images.get(j, {}).items() if len(w) == length}


def pairing_sign(word: Sequence[int], wdegs: Sequence[int]) -> int:
    """``(-1)^{sum_{a<b} |w_a||x^b|}`` for ``x^{i}`` paired with ``w_{i}``."""
    e = 0
    for a in range(len(word)):
        for b_ in range(a + 1, len(word)):
            e += wdegs[word[a]] * (-wdegs[word[b_]])
    return sgn(e)


def _mult(word: Sequence[int], flavor: str) -> int:
    return multiplicity_factor(word) if flavor == SYMMETRIC else 1


def dualize(d: Derivation) -> Coderivation:
    """Coderivation on ``T^c(W)`` / ``S^c(W)`` dual to ``d`` (``W = X^t``)."""
    wdegs = [-x for x in d.degrees]
    cores: Dict[Word, Vec] = {}
    for j, img in d.images.items():
        s0 = sgn(d.degree * d.degrees[j])
        for w, c in img.items():
            if not w:
                raise ValueError("derivation with a constant term has no dual coderivation")
            v = s0 * pairing_sign(w, wdegs) * _mult(w, d.flavor) * c
            cores.setdefault(w, {})[j] = v
    return Coderivation(wdegs, d.flavor, d.degree, cores, d.max_length)


def undualize(b: Coderivation) -> Derivation:
    xdegs = [-x for x in b.degrees]
    images: Dict[int, Chain] = {}
    for w, vec in b.corestrictions.items():
        for j, v in vec.items():
            s0 = sgn(b.degree * xdegs[j])
            c = Fraction(s0 * pairing_sign(w, b.degrees)) * v / _mult(w, b.flavor)
            images.setdefault(j, {})[w] = c
    return Derivation(xdegs, b.flavor, b.degree, images, b.max_arity)
