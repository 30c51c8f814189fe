"""Inductive construction of flat formal connections and the transferred structure.

A series is a sparse dict keyed by ``(i, u)``: basis index ``i`` of the
algebra and a word ``u`` in the dual generators ``X^j``, one per harmonic
basis vector, of degree ``1 - |alpha_j|``. Words longer than the truncation
``N`` are dropped, which implements "modulo I^{N+1}".

Sign rules (``|.|`` is the degree in A, ``|.|_L`` the degree shifted by the
bracket degree, equal to ``|.|`` in the tensor flavor):

* ``(alpha u)(beta v) = (-1)^{|u||beta|} (alpha beta)(u v)``
* ``[alpha u, beta v] = (-1)^{|u||beta|_L} [alpha, beta](u v)``
* ``d(alpha u) = (d alpha) u``
* ``D(alpha u) = (-1)^{|alpha|_L} alpha D(u)`` for a derivation ``D`` of words
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, List, Optional, Tuple

from .algebra import AlgebraPresentation, LawResult, StructureReport, WITNESS_LIMIT, Witness
from .coalgebra import (
    AInftyStructure,
    Coderivation,
    Derivation,
    codifferential_to_ainfty,
    codifferential_to_linfty,
    dualize,
    extend_coderivation,
    pairing_sign,
)
from .graded import SYMMETRIC, TENSOR, GradedSpace, WordAlgebra
from .linalg import Vec, add_term, axpy
from .splitting import Splitting

Key = Tuple[int, Tuple[int, ...]]
Series = Dict[Key, Fraction]


class TransferError(RuntimeError):
    pass


def sgn(e: int) -> int:
    return -1 if e % 2 else 1


class SeriesRing:
    """``A ⊗ T(X)`` or ``A ⊗ S(X)`` truncated at word length ``N``."""

    def __init__(self, p: AlgebraPresentation, split: Splitting, flavor: str, N: int, shift: int = 0):
        if N < 1:
            raise ValueError("truncation N must be >= 1")
        self.p = p
        self.split = split
        self.flavor = flavor
        self.N = N
        self.shift = shift
        self.true_deg = list(p.space.degrees)
        self.adeg = [d + shift for d in p.space.degrees]
        self.hdeg = [d + shift for d in split.hspace.degrees]
        self.xdeg = [1 - d for d in self.hdeg]
        names = [f"X{s}" for s in split.hspace.symbols]
        self.R = WordAlgebra(self.xdeg, flavor, N, names)
        self.hspace = GradedSpace(tuple(
            (s, d) for s, d in zip(split.hspace.symbols, self.hdeg)
        ))

    # -- arithmetic -------------------------------------------------------

    def _bilinear(self, table, degs, x: Series, y: Series, max_len=None) -> Series:
        out: Series = {}
        R = self.R
        for (i, u), a in x.items():
            du = R.degree(u)
            for (j, v), b in y.items():
                if max_len is not None and len(u) + len(v) != max_len:
                    continue
                r = table.get((i, j))
                if not r:
                    continue
                s, w = R.multiply(u, v)
                if not s:
                    continue
                c = a * b * s * sgn(du * degs[j])
                for k, e in r.items():
                    add_term(out, (k, w), c * e)
        return out

    def mul(self, x: Series, y: Series, length=None) -> Series:
        return self._bilinear(self.p.product, self.true_deg, x, y, length)

    def bracket(self, x: Series, y: Series, length=None) -> Series:
        if self.p.bracket is None:
            return {}
        return self._bilinear(self.p.bracket.entries, self.adeg, x, y, length)

    def d(self, x: Series) -> Series:
        out: Series = {}
        for (i, u), a in x.items():
            for k, c in self.p.d({i: Fraction(1)}).items():
                add_term(out, (k, u), a * c)
        return out

    def derive(self, images: Dict[int, Dict[Tuple[int, ...], Fraction]], x: Series) -> Series:
        out: Series = {}
        for (i, u), a in x.items():
            s = sgn(self.adeg[i])
            for w, c in self.R.apply_derivation(images, 1, u).items():
                add_term(out, (i, w), s * a * c)
        return out

    def omega_one(self) -> Series:
        out: Series = {}
        for j, h in enumerate(self.split.harmonic):
            for i, c in h.items():
                add_term(out, (i, (j,)), c)
        return out

    def curvature_quadratic(self, x: Series, y: Series, length=None) -> Series:
        """``x·y`` (tensor flavor) or ``1/2 [x, y]`` (symmetric flavor)."""
        if self.flavor == TENSOR:
            return self.mul(x, y, length)
        return {k: v / 2 for k, v in self.bracket(x, y, length).items()}

    def coefficient(self, x: Series, word) -> Vec:
        return {i: c for (i, u), c in x.items() if u == word}

    def by_word(self, x: Series) -> Dict[Tuple[int, ...], Vec]:
        out: Dict[Tuple[int, ...], Vec] = {}
        for (i, u), c in x.items():
            out.setdefault(u, {})[i] = c
        return out

    def key_degree(self, key: Key) -> int:
        i, u = key
        return self.true_deg[i] + self.R.degree(u)

    def keys(self) -> List[Key]:
        return [(i, u) for u in self.R.words() for i in range(self.p.dim)]

    def format_key(self, key: Key) -> str:
        i, u = key
        return f"{self.p.space.symbol(i)}*{self.R.format(u)}"

    def format_series(self, x: Series) -> Dict[str, str]:
        return {self.format_key(k): str(c) for k, c in sorted(x.items(), key=_key_order)}


def _key_order(item):
    (i, u), _ = item
    return (len(u), u, i)


@dataclass
class TransferResult:
    ring: SeriesRing
    derivation: Derivation
    omega: Series
    gammas: Dict[int, Series] = field(default_factory=dict)

    @property
    def flavor(self) -> str:
        return self.ring.flavor

    @property
    def N(self) -> int:
        return self.ring.N

    def omega_length(self, n: int) -> Series:
        return {k: c for k, c in self.omega.items() if len(k[1]) == n}


def _length_part(images, L):
    return {j: {w: c for w, c in img.items() if len(w) == L} for j, img in images.items()}


def _induction(ring: SeriesRing) -> TransferResult:
    split = ring.split
    N = ring.N
    omega_by_len: Dict[int, Series] = {1: ring.omega_one()}
    images: Dict[int, Dict[Tuple[int, ...], Fraction]] = {}
    gammas: Dict[int, Series] = {}
    for n in range(1, N):
        L = n + 1
        gamma: Series = {}
        # derivation part: images of length m raise u (length L-m+1) to length L
        for m in range(2, L + 1):
            part = _length_part(images, m)
            src = omega_by_len.get(L - m + 1)
            if src and any(part.values()):
                axpy(gamma, ring.derive(part, src))
        for a in range(1, L):
            x, y = omega_by_len.get(a), omega_by_len.get(L - a)
            if x and y:
                axpy(gamma, ring.curvature_quadratic(x, y, L))
        if ring.d(gamma):
            raise TransferError(f"Gamma at step {L} is not closed")
        gammas[L] = gamma
        new_omega: Series = {}
        for u, vec in ring.by_word(gamma).items():
            for j, c in split.projection.apply(vec).items():
                img = images.setdefault(j, {})
                add_term(img, u, -sgn(ring.hdeg[j]) * c)
            for k, c in split.Q.apply(vec).items():
                add_term(new_omega, (k, u), -c)
        if new_omega:
            omega_by_len[L] = new_omega
    omega: Series = {}
    for part in omega_by_len.values():
        axpy(omega, part)
    der = Derivation(ring.xdeg, ring.flavor, 1, images, N)
    return TransferResult(ring, der, omega, gammas)


def chen_transfer(p: AlgebraPresentation, split: Splitting, N: int) -> TransferResult:
    return _induction(SeriesRing(p, split, TENSOR, N))


def hain_transfer(p: AlgebraPresentation, split: Splitting, N: int) -> TransferResult:
    """Symmetric-flavor induction for the bracket of ``p``.

    Working degrees are shifted by the bracket degree so the bracket has
    degree zero; generators then sit in degree ``1 - |alpha|_L``.
    """
    if p.bracket is None:
        raise ValueError("hain_transfer needs a bracket")
    return _induction(SeriesRing(p, split, SYMMETRIC, N, shift=p.bracket.degree))


# ---------------------------------------------------------------------------
# verification


def _series_law(name: str, ring: SeriesRing, x: Series, max_len: int) -> LawResult:
    bad = {k: c for k, c in x.items() if len(k[1]) <= max_len}
    words = sorted({u for _, u in bad}, key=lambda u: (len(u), u))
    wits = []
    for u in words[:WITNESS_LIMIT]:
        vec = ring.coefficient(bad, u)
        wits.append(Witness((ring.R.format(u),),
                            {ring.p.space.symbol(i): c for i, c in sorted(vec.items())}))
    checked = len(ring.R.words())
    return LawResult(name, checked, len(words), wits)


def flatness_expression(res: TransferResult, omega: Optional[Series] = None,
                        der: Optional[Derivation] = None) -> Series:
    ring = res.ring
    omega = res.omega if omega is None else omega
    der = res.derivation if der is None else der
    total = ring.derive(der.images, omega)
    axpy(total, ring.d(omega))
    axpy(total, ring.curvature_quadratic(omega, omega))
    return total


def curvature(res: TransferResult, omega: Optional[Series] = None) -> Series:
    ring = res.ring
    omega = res.omega if omega is None else omega
    return axpy(ring.d(omega), ring.curvature_quadratic(omega, omega))


def verify_flatness(res: TransferResult, omega: Optional[Series] = None,
                    der: Optional[Derivation] = None) -> StructureReport:
    ring = res.ring
    N = ring.N
    omega = res.omega if omega is None else omega
    der = res.derivation if der is None else der
    laws = []
    low = {k: c for k, c in omega.items() if len(k[1]) <= 1}
    a_def = axpy(dict(low), ring.omega_one(), -1)
    laws.append(_series_law("a_omega_mod_I", ring, a_def, 1))
    flat = flatness_expression(res, omega, der)
    laws.append(_series_law(f"b_flat_mod_I^{N + 1}", ring, flat, N))
    curv = curvature(res, omega)
    laws.append(_series_law("curvature_is_minus_d_omega", ring,
                            axpy(dict(curv), ring.derive(der.images, omega)), N))
    sq = der.square_defect()
    fails, wits = 0, []
    for j, chain in sorted(sq.items()):
        fails += 1
        if len(wits) < WITNESS_LIMIT:
            wits.append(Witness((ring.R.names[j],),
                                {ring.R.format(w): c for w, c in sorted(chain.items())}))
    laws.append(LawResult(f"d_partial_squared_mod_I^{N + 1}", len(ring.xdeg), fails, wits))
    bad = [j for j, img in der.images.items() if any(len(w) < 2 for w in img)]
    laws.append(LawResult("partial_I_in_I2", len(ring.xdeg), len(bad),
                          [Witness((ring.R.names[j],), {}) for j in bad[:WITNESS_LIMIT]]))
    for L, g in sorted(res.gammas.items()):
        dg = ring.d(g)
        laws.append(_series_law(f"gamma_closed_step{L}", ring, dg, N))
    return StructureReport(laws)


# ---------------------------------------------------------------------------
# extraction


def raw_coderivation(res: TransferResult) -> Coderivation:
    return dualize(res.derivation)


def extract_infinity(res: TransferResult, normalize: bool = True):
    """Transferred ``m_n`` (tensor flavor) or ``l_n`` (symmetric flavor).

    With ``normalize`` the raw dictionary output is conjugated by ``-id``
    (``m_n -> (-1)^{n+1} m_n``), a strict isomorphism that makes ``m_2`` the
    induced product instead of its negative.
    """
    b = raw_coderivation(res)
    space = res.ring.hspace
    if res.flavor == TENSOR:
        st = codifferential_to_ainfty(b, space)
    else:
        st = codifferential_to_linfty(b, space)
    if normalize:
        st.maps = {w: {k: sgn(len(w) + 1) * c for k, c in v.items()} for w, v in st.maps.items()}
    return st


# ---------------------------------------------------------------------------
# twisting cochain


@dataclass
class TwistingCochain:
    """``values[w]`` is ``tau(w)`` for a word ``w`` of the bar side."""

    ring: SeriesRing
    values: Dict[Tuple[int, ...], Vec]
    coderivation: Coderivation

    def tau(self, chain: Dict[Tuple[int, ...], Fraction]) -> Vec:
        out: Vec = {}
        for w, c in chain.items():
            v = self.values.get(w)
            if v:
                axpy(out, v, c)
        return out


def twisting_cochain(res: TransferResult) -> TwistingCochain:
    if res.flavor != TENSOR:
        raise ValueError("twisting cochains are built for the tensor flavor")
    ring = res.ring
    wdegs = [-x for x in ring.xdeg]
    vals: Dict[Tuple[int, ...], Vec] = {}
    for (i, u), c in res.omega.items():
        v = vals.setdefault(u, {})
        add_term(v, i, sgn(ring.adeg[i]) * pairing_sign(u, wdegs) * c)
    vals = {u: v for u, v in vals.items() if v}
    return TwistingCochain(ring, vals, raw_coderivation(res))


def verify_twisting_cochain(tc: TwistingCochain) -> StructureReport:
    ring = tc.ring
    p = ring.p
    b = tc.coderivation
    wdegs = b.degrees
    fails, wits, checked = 0, [], 0
    for w in ring.R.words():
        if not w:
            continue
        checked += 1
        lhs = tc.tau(extend_coderivation(b, w))
        axpy(lhs, p.d(tc.values.get(w, {})))
        cup: Vec = {}
        pre = 0
        for i in range(1, len(w)):
            pre += wdegs[w[i - 1]]
            x, y = tc.values.get(w[:i]), tc.values.get(w[i:])
            if x and y:
                axpy(cup, p.mul(x, y), sgn(pre))
        axpy(lhs, cup, -1)
        if lhs:
            fails += 1
            if len(wits) < WITNESS_LIMIT:
                wits.append(Witness((ring.R.format(w),),
                                    {p.space.symbol(k): c for k, c in sorted(lhs.items())}))
    return StructureReport([LawResult("tau_b_plus_d_tau_equals_cup", checked, fails, wits)])


# ---------------------------------------------------------------------------
# tree-formula transfer of a product along an SDR (bar side)


class TreeTransfer:
    """Transferred ``m_n`` along an SDR by the recursive tree formula.

    All maps are callables on sparse vectors; ``mul`` is the product of the big
    algebra, ``degree`` gives the degree of a big basis key. Values are
    memoized per tuple of small basis keys; ``m(word)`` returns the
    ``m_n`` read off ``b'_n`` through the dictionary sign. With the SDR
    homotopy ``phi = -Q`` this reproduces the normalized output of
    :func:`extract_infinity`.
    """

    def __init__(self, small_degree, big_degree, mul, nabla, f, homotopy, d_small=None):
        self.small_degree = small_degree
        self.big_degree = big_degree
        self.mul = mul
        self.nabla = nabla
        self.f = f
        self.h = homotopy
        self.d_small = d_small
        self._F: Dict[tuple, Vec] = {}
        self._G: Dict[tuple, Vec] = {}

    def _b2(self, x: Vec, y: Vec) -> Vec:
        # s^-1 x, s^-1 y -> (-1)^{|x|} s^-1 (x y), x taken homogeneous per key
        out: Vec = {}
        for k, a in x.items():
            axpy(out, self.mul({k: a}, y), sgn(self.big_degree(k)))
        return out

    def F(self, word: tuple) -> Vec:
        if word in self._F:
            return self._F[word]
        if len(word) == 1:
            val = self.nabla({word[0]: Fraction(1)})
        else:
            val = self.h(self.G(word))
        self._F[word] = val
        return val

    def G(self, word: tuple) -> Vec:
        if word in self._G:
            return self._G[word]
        out: Vec = {}
        for i in range(1, len(word)):
            x = self.F(word[:i])
            if not x:
                continue
            y = self.F(word[i:])
            if y:
                axpy(out, self._b2(x, y))
        self._G[word] = out
        return out

    def bar(self, word: tuple) -> Vec:
        """Corestriction ``b'_n`` of the transferred codifferential."""
        if len(word) == 1:
            if self.d_small is None:
                return {}
            return self.d_small({word[0]: Fraction(1)})
        return self.f(self.G(word))

    def m(self, word: tuple) -> Vec:
        word = tuple(word)
        k = len(word)
        raw = self.bar(word)
        if not raw:
            return {}
        e = sum((k - 1 - j) * self.small_degree(x) for j, x in enumerate(word))
        return {key: sgn(e) * c for key, c in raw.items()}


def tree_ainfty(p: AlgebraPresentation, split: Splitting, arity: int) -> AInftyStructure:
    """Tree-formula transfer on the plain DGA (cross-check for the induction)."""
    sp = split.hspace
    tt = TreeTransfer(
        sp.degree, p.space.degree, p.mul, split.inclusion.apply, split.projection.apply,
        lambda v: {k: -c for k, c in split.Q.apply(v).items()},
    )
    maps = {}
    for n in range(2, arity + 1):
        for w in cartesian(range(sp.dim), repeat=n):
            want = sum(sp.degree(x) for x in w) + 2 - n
            if not sp.in_degree(want):
                continue
            v = tt.m(w)
            if v:
                maps[w] = v
    return AInftyStructure(sp, maps, arity)
