"""Graded vector spaces over Q, Koszul signs, shifts, duals and words.

Scalars are :class:`fractions.Fraction` throughout. Sparse vectors are plain
dicts mapping a basis key to a nonzero Fraction; helpers for them live in
:mod:`hptk.linalg`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Scalar = Fraction

TENSOR = "tensor"
SYMMETRIC = "symmetric"

DEFAULT_WORD_CAP = 10**7


class ResourceBoundExceeded(RuntimeError):
    """Raised when an enumeration would pass the configured size cap."""


def parity_sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def koszul_sign(left_degrees: Sequence[int], right_degrees: Sequence[int]) -> int:
    """Sign for moving a block of degrees ``left`` past a block ``right``."""
    return parity_sign(sum(left_degrees) * sum(right_degrees))


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional Z-graded space with an ordered, named basis."""

    basis: Tuple[Tuple[str, int], ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        basis = tuple((str(s), int(d)) for s, d in self.basis)
        object.__setattr__(self, "basis", basis)
        index = {}
        for i, (sym, _) in enumerate(basis):
            if sym in index:
                raise ValueError(f"duplicate basis symbol {sym!r}")
            index[sym] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, int]]) -> "GradedSpace":
        return cls(tuple(pairs))

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def symbols(self) -> List[str]:
        return [s for s, _ in self.basis]

    @property
    def degrees(self) -> List[int]:
        return [d for _, d in self.basis]

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    def symbol(self, i: int) -> str:
        return self.basis[i][0]

    def index(self, symbol: str) -> int:
        return self._index[symbol]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def in_degree(self, n: int) -> List[int]:
        return [i for i, (_, d) in enumerate(self.basis) if d == n]

    def occupied_degrees(self) -> List[int]:
        return sorted(set(self.degrees))

    def dims_by_degree(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))


def shift(space: GradedSpace, amount: int = 1) -> GradedSpace:
    """Suspension: ``shift(V, +1)`` lowers every degree by one.

    The symbol records the accumulated shift so that ``shift(shift(V, 1), -1)``
    is literally ``V`` again.
    """
    basis = []
    for sym, deg in space.basis:
        base, k = _split_shift(sym)
        k += amount
        basis.append((_join_shift(base, k), deg - amount))
    return GradedSpace(tuple(basis))


def dual(space: GradedSpace) -> GradedSpace:
    """Linear dual; degrees negate and symbols gain (or lose) a ``^t``.

    Symbols are normalised so that ``(s^k V)^t`` is written ``s^-k(V^t)``.
    """
    basis = []
    for sym, deg in space.basis:
        base, k = _split_shift(sym)
        base = base[:-2] if base.endswith("^t") else base + "^t"
        basis.append((_join_shift(base, -k), -deg))
    return GradedSpace(tuple(basis))


def _split_shift(sym: str) -> Tuple[str, int]:
    k = 0
    while True:
        if sym.startswith("s(") and sym.endswith(")"):
            sym, k = sym[2:-1], k + 1
        elif sym.startswith("s^-1(") and sym.endswith(")"):
            sym, k = sym[5:-1], k - 1
        else:
            return sym, k


def _join_shift(base: str, k: int) -> str:
    wrap = "s(%s)" if k > 0 else "s^-1(%s)"
    for _ in range(abs(k)):
        base = wrap % base
    return base


@dataclass
class GradedMap:
    """Sparse homogeneous linear map between graded spaces.

    ``columns[j]`` is the image of source basis element ``j`` as a sparse
    vector over target indices.
    """

    source: GradedSpace
    target: GradedSpace
    degree: int
    columns: Dict[int, Dict[int, Fraction]]

    def __post_init__(self):
        cleaned = {}
        for j, col in self.columns.items():
            col = {i: Fraction(c) for i, c in col.items() if c}
            if not col:
                continue
            want = self.source.degree(j) + self.degree
            for i in col:
                if self.target.degree(i) != want:
                    raise ValueError(
                        f"map of degree {self.degree} sends {self.source.symbol(j)!r} "
                        f"to {self.target.symbol(i)!r} (degree {self.target.degree(i)})"
                    )
            cleaned[j] = col
        self.columns = cleaned

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, degree: int) -> "GradedMap":
        return cls(source, target, degree, {})

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedMap":
        return cls(space, space, 0, {i: {i: Fraction(1)} for i in range(space.dim)})

    def column(self, j: int) -> Dict[int, Fraction]:
        return self.columns.get(j, {})

    def apply(self, vec: Dict[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for j, c in vec.items():
            for i, v in self.columns.get(j, {}).items():
                s = out.get(i, 0) + c * v
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return out

    def compose(self, other: "GradedMap") -> "GradedMap":
        """``self ∘ other``."""
        cols = {j: self.apply(col) for j, col in other.columns.items()}
        return GradedMap(other.source, self.target, self.degree + other.degree, cols)

    def is_zero(self) -> bool:
        return not self.columns

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.degree == other.degree
            and self.columns == other.columns
        )


# ---------------------------------------------------------------------------
# words


def sort_sign(word: Sequence[int], degrees: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Stable-sort ``word`` by index; return the Koszul sign of the permutation.

    Returns sign 0 when a factor of odd degree repeats (the word vanishes in
    the graded-symmetric algebra).
    """
    items = list(word)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            if degrees[items[j - 1]] % 2 and degrees[items[j]] % 2:
                sign = -sign
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b and degrees[a] % 2:
            return 0, tuple(items)
    return sign, tuple(items)


def canonicalize(word: Sequence[int], degrees: Sequence[int], flavor: str):
    """Canonical form ``(sign, word)``; sign 0 means the word is zero."""
    if flavor == TENSOR:
        return 1, tuple(word)
    return sort_sign(word, degrees)


def word_degree(word: Sequence[int], degrees: Sequence[int]) -> int:
    return sum(degrees[i] for i in word)


def multiplicity_factor(word: Sequence[int]) -> int:
    """Product of factorials of letter multiplicities."""
    out = 1
    run = 1
    for a, b in zip(word, word[1:]):
        if a == b:
            run += 1
            out *= run
        else:
            run = 1
    return out


def enumerate_words(
    degrees: Sequence[int],
    flavor: str,
    max_length: int,
    cap: int = DEFAULT_WORD_CAP,
) -> Dict[Tuple[int, int], List[Tuple[int, ...]]]:
    """All nonzero canonical words of length <= max_length keyed by (length, degree).

    Accepts either a degree list or a :class:`GradedSpace`.
    """
    if isinstance(degrees, GradedSpace):
        degrees = degrees.degrees
    if max_length < 0:
        raise ValueError("max_length must be >= 0")
    n = len(degrees)
    out: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {(0, 0): [()]}
    count = 1
    for length in range(1, max_length + 1):
        if flavor == TENSOR:
            total = n**length
            if count + total > cap:
                raise ResourceBoundExceeded(
                    f"{count + total} words up to length {length} exceed cap {cap}"
                )
            words = cartesian(range(n), repeat=length)
        else:
            words = _sorted_words(n, length, degrees)
        for w in words:
            count += 1
            if count > cap:
                raise ResourceBoundExceeded(f"word count exceeds cap {cap}")
            out.setdefault((length, word_degree(w, degrees)), []).append(tuple(w))
    return out


def _sorted_words(n: int, length: int, degrees: Sequence[int]):
    def rec(start, remaining):
        if remaining == 0:
            yield ()
            return
        for i in range(start, n):
            nxt = i + 1 if degrees[i] % 2 else i
            for rest in rec(nxt, remaining - 1):
                yield (i,) + rest

    return rec(0, length)


class WordAlgebra:
    """Truncated tensor or graded-symmetric algebra on generators of given degrees.

    Words are tuples of generator indices; symmetric words are kept sorted.
    Products of total length above ``max_length`` vanish (quotient by I^{N+1}).
    """

    def __init__(self, degrees: Sequence[int], flavor: str, max_length: int, names=None):
        if flavor not in (TENSOR, SYMMETRIC):
            raise ValueError(f"unknown flavor {flavor!r}")
        self.degrees = list(degrees)
        self.flavor = flavor
        self.max_length = max_length
        self.names = list(names) if names is not None else [f"X{i}" for i in range(len(degrees))]
        self._words = None

    @property
    def ngens(self) -> int:
        return len(self.degrees)

    def degree(self, word: Sequence[int]) -> int:
        return word_degree(word, self.degrees)

    def canonical(self, word: Sequence[int]):
        return canonicalize(word, self.degrees, self.flavor)

    def multiply(self, u: Tuple[int, ...], v: Tuple[int, ...]):
        """``(sign, word)`` of ``u·v``; sign 0 if it vanishes or is truncated."""
        if len(u) + len(v) > self.max_length:
            return 0, ()
        if self.flavor == TENSOR:
            return 1, u + v
        if not u or not v or u[-1] < v[0]:
            return 1, u + v
        return sort_sign(u + v, self.degrees)

    def words(self) -> List[Tuple[int, ...]]:
        """Every nonzero canonical word up to the truncation, ordered by length."""
        if self._words is None:
            table = enumerate_words(self.degrees, self.flavor, self.max_length)
            self._words = [
                w for key in sorted(table) for w in table[key]
            ]
            self._words.sort(key=lambda w: (len(w), w))
        return self._words

    def format(self, word: Sequence[int]) -> str:
        if not word:
            return "1"
        sep = "*" if self.flavor == TENSOR else "."
        return sep.join(self.names[i] for i in word)

    def apply_derivation(
        self,
        images: Dict[int, Dict[Tuple[int, ...], Fraction]],
        degree: int,
        word: Tuple[int, ...],
    ) -> Dict[Tuple[int, ...], Fraction]:
        """Apply the derivation with generator images ``images`` to one word."""
        out: Dict[Tuple[int, ...], Fraction] = {}
        prefix_deg = 0
        for k, g in enumerate(word):
            img = images.get(g)
            if img:
                sgn = -1 if (degree * prefix_deg) % 2 else 1
                pre, post = word[:k], word[k + 1:]
                for w, c in img.items():
                    if len(pre) + len(w) + len(post) > self.max_length:
                        continue
                    s, cw = self.canonical(pre + w + post)
                    if s:
                        val = out.get(cw, 0) + sgn * s * c
                        if val:
                            out[cw] = val
                        else:
                            out.pop(cw, None)
            prefix_deg += self.degrees[g]
        return out

    def apply_derivation_vec(self, images, degree, vec):
        out: Dict[Tuple[int, ...], Fraction] = {}
        for w, c in vec.items():
            for w2, c2 in self.apply_derivation(images, degree, w).items():
                val = out.get(w2, 0) + c * c2
                if val:
                    out[w2] = val
                else:
                    out.pop(w2, None)
        return out


def subsequences(word: Sequence, k: int) -> Iterable[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Position splits of ``word`` into a chosen k-subsequence and the rest."""
    from itertools import combinations

    n = len(word)
    for chosen in combinations(range(n), k):
        rest = tuple(i for i in range(n) if i not in chosen)
        yield chosen, rest


def permutation_parity(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def koszul_permutation_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of reordering items of the given degrees into ``perm`` order.

    ``perm[i]`` is the position (in the original sequence) of the i-th item of
    the new sequence.
    """
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b] and degrees[perm[a]] % 2 and degrees[perm[b]] % 2:
                sign = -sign
    return sign


def optional_index(space: GradedSpace, symbol: Optional[str]) -> Optional[int]:
    return None if symbol is None else space.index(symbol)
