"""Algebra presentations by structure constants, law validators, cohomology.

Laws are checked on basis tuples only, which suffices by multilinearity.
A failing law always carries at least one witness: the offending basis
tuple and the exact nonzero defect vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .graded import GradedMap, GradedSpace
from .linalg import Reducer, Vec, axpy, scale, solve_exact
from .parallel import pmap

WITNESS_LIMIT = 32


@dataclass
class Bracket:
    """Bilinear bracket given by structure constants.

    ``shift`` is 0 for a Lie bracket of degree 0 (Poisson flavor) and -1 for
    an odd bracket that is a Lie bracket on the suspension (Gerstenhaber
    flavor). ``degree`` is the bracket's degree on the unshifted space.
    """

    entries: Dict[Tuple[int, int], Vec]
    shift: int = 0
    degree: int = 0

    def __post_init__(self):
        if self.shift not in (0, -1):
            raise ValueError("bracket shift must be 0 or -1")
        if self.shift == 0 and self.degree != 0:
            raise ValueError("a shift-0 bracket has degree 0")


@dataclass
class AlgebraPresentation:
    space: GradedSpace
    product: Dict[Tuple[int, int], Vec] = field(default_factory=dict)
    differential: Optional[GradedMap] = None
    unit: Optional[int] = None
    bracket: Optional[Bracket] = None
    bv_operator: Optional[GradedMap] = None
    name: str = ""
    gram: object = None

    def __post_init__(self):
        sp = self.space
        clean = {}
        for (i, j), vec in self.product.items():
            vec = {k: Fraction(c) for k, c in vec.items() if c}
            for k in vec:
                if sp.degree(k) != sp.degree(i) + sp.degree(j):
                    raise ValueError(
                        f"product {sp.symbol(i)}*{sp.symbol(j)} -> {sp.symbol(k)} "
                        "is not degree-additive"
                    )
            if vec:
                clean[(i, j)] = vec
        self.product = clean
        if self.differential is not None and self.differential.degree != 1:
            raise ValueError("differential must have degree +1")
        if self.bracket is not None:
            shift = self.bracket.degree
            clean = {}
            for (i, j), vec in self.bracket.entries.items():
                vec = {k: Fraction(c) for k, c in vec.items() if c}
                for k in vec:
                    if sp.degree(k) != sp.degree(i) + sp.degree(j) + shift:
                        raise ValueError(
                            f"bracket [{sp.symbol(i)},{sp.symbol(j)}] -> {sp.symbol(k)} "
                            f"does not have degree {shift}"
                        )
                if vec:
                    clean[(i, j)] = vec
            self.bracket.entries = clean

    # -- evaluation on sparse vectors over basis indices ------------------

    @property
    def dim(self) -> int:
        return self.space.dim

    def deg(self, i: int) -> int:
        return self.space.degree(i)

    def lie_deg(self, i: int) -> int:
        """Degree entering the Lie sign rules: ``|a|`` or ``|a| - 1`` on the suspension."""
        if self.bracket is not None and self.bracket.shift == -1:
            return self.space.degree(i) - 1
        return self.space.degree(i)

    def basis_vec(self, i: int) -> Vec:
        return {i: Fraction(1)}

    def mul(self, x: Vec, y: Vec) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            for j, b in y.items():
                r = self.product.get((i, j))
                if r:
                    axpy(out, r, a * b)
        return out

    def br(self, x: Vec, y: Vec) -> Vec:
        out: Vec = {}
        if self.bracket is None:
            return out
        ent = self.bracket.entries
        for i, a in x.items():
            for j, b in y.items():
                r = ent.get((i, j))
                if r:
                    axpy(out, r, a * b)
        return out

    def d(self, x: Vec) -> Vec:
        if self.differential is None:
            return {}
        return self.differential.apply(x)

    def delta(self, x: Vec) -> Vec:
        if self.bv_operator is None:
            return {}
        return self.bv_operator.apply(x)

    def differential_or_zero(self) -> GradedMap:
        if self.differential is not None:
            return self.differential
        return GradedMap.zero(self.space, self.space, 1)

    def with_differential(self, dmap: Optional[GradedMap]) -> "AlgebraPresentation":
        return AlgebraPresentation(
            self.space, self.product, dmap, self.unit, self.bracket,
            self.bv_operator, self.name, self.gram,
        )

    def with_bracket(self, bracket: Optional[Bracket]) -> "AlgebraPresentation":
        return AlgebraPresentation(
            self.space, self.product, self.differential, self.unit, bracket,
            self.bv_operator, self.name, self.gram,
        )


def vec_degree(space: GradedSpace, vec: Vec) -> Optional[int]:
    degs = {space.degree(i) for i in vec}
    if len(degs) > 1:
        raise ValueError("vector is not homogeneous")
    return degs.pop() if degs else None


def sgn(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# reports


@dataclass
class Witness:
    inputs: Tuple[str, ...]
    defect: Dict[str, Fraction]


@dataclass
class LawResult:
    name: str
    checked: int
    failures: int
    witnesses: List[Witness]

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class StructureReport:
    laws: List[LawResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(l.passed for l in self.laws)

    def law(self, name: str) -> LawResult:
        for l in self.laws:
            if l.name == name:
                return l
        raise KeyError(name)

    def failed(self) -> List[LawResult]:
        return [l for l in self.laws if not l.passed]

    def extend(self, other: "StructureReport") -> "StructureReport":
        self.laws.extend(other.laws)
        return self

    def to_json(self):
        return [
            {
                "law": l.name,
                "passed": l.passed,
                "checked": l.checked,
                "failures": l.failures,
                "witnesses": [
                    {"inputs": list(w.inputs), "defect": {k: str(v) for k, v in w.defect.items()}}
                    for w in l.witnesses
                ],
            }
            for l in self.laws
        ]


def named(space: GradedSpace, vec: Vec) -> Dict[str, Fraction]:
    return {space.symbol(i): c for i, c in sorted(vec.items())}


def run_law(
    space: GradedSpace,
    name: str,
    arity: int,
    defect: Callable[..., Vec],
    index_sets: Optional[Sequence[Sequence[int]]] = None,
) -> LawResult:
    """Evaluate ``defect`` on every basis tuple of the given arity."""
    if index_sets is None:
        index_sets = [range(space.dim)] * arity
    checked = failures = 0
    wits: List[Witness] = []
    for tup in cartesian(*index_sets):
        checked += 1
        v = defect(*tup)
        if v:
            failures += 1
            if len(wits) < WITNESS_LIMIT:
                wits.append(Witness(tuple(space.symbol(i) for i in tup), named(space, v)))
    return LawResult(name, checked, failures, wits)


def _laws(space, specs, threads=None) -> StructureReport:
    results = pmap(lambda s: run_law(space, *s), specs, threads)
    return StructureReport(results)


def _e(i):
    return {i: Fraction(1)}


# ---------------------------------------------------------------------------
# law families


def _assoc_specs(p: AlgebraPresentation):
    m = p.mul

    def assoc(a, b, c):
        return axpy(m(m(_e(a), _e(b)), _e(c)), m(_e(a), m(_e(b), _e(c))), -1)

    return [("associativity", 3, assoc)]


def _differential_specs(p: AlgebraPresentation):
    if p.differential is None:
        return []
    d, m = p.d, p.mul

    def leibniz(a, b):
        lhs = d(m(_e(a), _e(b)))
        axpy(lhs, m(d(_e(a)), _e(b)), -1)
        axpy(lhs, m(_e(a), d(_e(b))), -sgn(p.deg(a)))
        return lhs

    def square(a):
        return d(d(_e(a)))

    return [("d_leibniz", 2, leibniz), ("d_squared", 1, square)]


def _unit_specs(p: AlgebraPresentation):
    if p.unit is None:
        return []
    u = p.unit
    m = p.mul

    def left(a):
        return axpy(m(_e(u), _e(a)), _e(a), -1)

    def right(a):
        return axpy(m(_e(a), _e(u)), _e(a), -1)

    return [("unit_left", 1, left), ("unit_right", 1, right)]


def _lie_specs(p: AlgebraPresentation, prefix: str = ""):
    b = p.br
    L = p.lie_deg

    def antisym(x, y):
        return axpy(b(_e(x), _e(y)), b(_e(y), _e(x)), sgn(L(x) * L(y)))

    def jacobi(x, y, z):
        out = b(_e(x), b(_e(y), _e(z)))
        axpy(out, b(b(_e(x), _e(y)), _e(z)), -1)
        axpy(out, b(_e(y), b(_e(x), _e(z))), -sgn(L(x) * L(y)))
        return out

    specs = [(prefix + "antisymmetry", 2, antisym), (prefix + "jacobi", 3, jacobi)]
    if p.differential is not None:
        d = p.d

        def d_bracket(x, y):
            out = d(b(_e(x), _e(y)))
            axpy(out, b(d(_e(x)), _e(y)), -1)
            axpy(out, b(_e(x), d(_e(y))), -sgn(L(x)))
            return out

        specs.append((prefix + "d_bracket_derivation", 2, d_bracket))
    return specs


def _compat_specs(p: AlgebraPresentation, name: str):
    """``[a, bc] = [a,b]c + (-1)^{|a|_L |b|} b[a,c]``."""
    b, m, L = p.br, p.mul, p.lie_deg

    def compat(x, y, z):
        out = b(_e(x), m(_e(y), _e(z)))
        axpy(out, m(b(_e(x), _e(y)), _e(z)), -1)
        axpy(out, m(_e(y), b(_e(x), _e(z))), -sgn(L(x) * p.deg(y)))
        return out

    return [(name, 3, compat)]


def check_dga(p: AlgebraPresentation, threads=None) -> StructureReport:
    specs = _assoc_specs(p) + _differential_specs(p) + _unit_specs(p)
    return _laws(p.space, specs, threads)


def check_dgla(p: AlgebraPresentation, threads=None) -> StructureReport:
    if p.bracket is None or p.bracket.shift != 0:
        raise ValueError("check_dgla needs a shift-0 bracket")
    specs = _lie_specs(p)
    if p.differential is not None:
        specs.append(("d_squared", 1, lambda a: p.d(p.d(_e(a)))))
    return _laws(p.space, specs, threads)


def check_poisson(p: AlgebraPresentation, threads=None) -> StructureReport:
    if p.bracket is None or p.bracket.shift != 0:
        raise ValueError("check_poisson needs a shift-0 bracket")
    specs = (
        _assoc_specs(p) + _differential_specs(p) + _unit_specs(p)
        + _lie_specs(p) + _compat_specs(p, "poisson_leibniz")
    )
    return _laws(p.space, specs, threads)


def check_gerstenhaber(p: AlgebraPresentation, threads=None) -> StructureReport:
    if p.bracket is None or p.bracket.shift != -1:
        raise ValueError("check_gerstenhaber needs a shift -1 bracket")
    if p.bracket.degree % 2 == 0:
        raise ValueError("a shift -1 bracket must have odd degree")
    specs = (
        _assoc_specs(p) + _differential_specs(p) + _unit_specs(p)
        + _lie_specs(p) + _compat_specs(p, "gerstenhaber_leibniz")
    )
    return _laws(p.space, specs, threads)


# ---------------------------------------------------------------------------
# BV


def _delta_degree(p: AlgebraPresentation) -> int:
    op = p.bv_operator
    if op is None:
        raise ValueError("no BV operator")
    return op.degree


def bracket_from_delta(p: AlgebraPresentation) -> Bracket:
    """``[a•b] = (-1)^{|a|} (Δ(ab) - Δ(a)b - (-1)^{|a|} aΔ(b))`` on basis pairs."""
    k = _delta_degree(p)
    n = p.dim
    for i in range(n):
        if p.delta(p.delta(_e(i))):
            raise ValueError(f"BV operator does not square to zero (on {p.space.symbol(i)!r})")
    m, D = p.mul, p.delta
    entries = {}
    for a in range(n):
        sa = sgn(p.deg(a))
        for b in range(n):
            ab = m(_e(a), _e(b))
            v = D(ab)
            axpy(v, m(D(_e(a)), _e(b)), -1)
            axpy(v, m(_e(a), D(_e(b))), -sa)
            if v:
                entries[(a, b)] = scale(v, sa)
    return Bracket(entries, shift=-1, degree=k)


def check_gbv(p: AlgebraPresentation, threads=None) -> StructureReport:
    """Validate a (differential) GBV algebra.

    The Leibniz law of the derived bracket is checked as a hypothesis and the
    Jacobi identity, the derivation law for Δ and the vanishing of the induced
    bracket on Δ-cohomology are checked independently as conclusions.
    """
    D = p.delta
    report = StructureReport()
    report.laws.append(run_law(p.space, "delta_squared", 1, lambda a: D(D(_e(a)))))
    k = _delta_degree(p)
    report.laws.append(
        LawResult("delta_odd", 1, 0 if k % 2 else 1,
                  [] if k % 2 else [Witness((), {"degree": Fraction(k)})])
    )
    if not report.law("delta_squared").passed:
        return report
    q = p.with_bracket(bracket_from_delta(p))
    m, b = q.mul, q.br

    def commutative(x, y):
        return axpy(m(_e(x), _e(y)), m(_e(y), _e(x)), -sgn(p.deg(x) * p.deg(y)))

    specs = [("graded_commutative", 2, commutative)]
    specs += _assoc_specs(q) + _unit_specs(q)
    if q.unit is not None:
        specs.append(("unit_bracket", 1, lambda a: b(_e(q.unit), _e(a))))
    specs += _compat_specs(q, "leibniz")
    specs += _lie_specs(q.with_differential(None))
    L = q.lie_deg

    def delta_derivation(x, y):
        out = D(b(_e(x), _e(y)))
        axpy(out, b(D(_e(x)), _e(y)), -1)
        axpy(out, b(_e(x), D(_e(y))), -sgn(L(x)))
        return out

    specs.append(("delta_bracket_derivation", 2, delta_derivation))
    if p.differential is not None:
        d = p.d
        specs += _differential_specs(q)
        specs.append(("d_delta_anticommute", 1, lambda a: axpy(d(D(_e(a))), D(d(_e(a))))))

        def d_bracket(x, y):
            out = d(b(_e(x), _e(y)))
            axpy(out, b(d(_e(x)), _e(y)), -1)
            axpy(out, b(_e(x), d(_e(y))), -sgn(L(x)))
            return out

        specs.append(("d_bracket_derivation", 2, d_bracket))
    report.extend(_laws(p.space, specs, threads))
    report.laws.append(_trivial_bracket_law(q))
    return report


def _trivial_bracket_law(q: AlgebraPresentation) -> LawResult:
    """Bracket of Δ-closed elements lies in the image of Δ."""
    n = q.dim
    cols = [q.delta(_e(i)) for i in range(n)]
    res = solve_exact(cols)
    closed = [dict(v) for v in res.kernel]
    img = Reducer()
    for v in res.image:
        img.add(v)
    checked = failures = 0
    wits = []
    for x in closed:
        for y in closed:
            checked += 1
            v = q.br(x, y)
            rem, _ = img.reduce(v)
            if rem:
                failures += 1
                if len(wits) < WITNESS_LIMIT:
                    wits.append(Witness(
                        (_fmt(q.space, x), _fmt(q.space, y)), named(q.space, rem)))
    return LawResult("trivial_bracket_on_cohomology", checked, failures, wits)


def _fmt(space: GradedSpace, vec: Vec) -> str:
    parts = []
    for i, c in sorted(vec.items()):
        parts.append(space.symbol(i) if c == 1 else f"{c}*{space.symbol(i)}")
    return "+".join(parts) or "0"


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class Cohomology:
    """Cohomology with echelon-chosen representatives.

    ``representatives[j]`` is a closed vector; ``product[(i, j)]`` are the
    structure constants of the induced product in representative coordinates.
    """

    space: GradedSpace
    representatives: List[Vec]
    rep_degrees: List[int]
    betti: Dict[int, int]
    kernel_dims: Dict[int, int]
    image_dims: Dict[int, int]
    product: Dict[Tuple[int, int], Vec]
    _image: Dict[int, Reducer] = field(repr=False)

    def quotient(self, closed: Vec) -> Vec:
        """Coordinates of the class of a closed vector."""
        out: Vec = {}
        by_deg: Dict[int, Vec] = {}
        for i, c in closed.items():
            by_deg.setdefault(self.space.degree(i), {})[i] = c
        for n, v in by_deg.items():
            red = self._image.get(n)
            y = red.reduce(v)[0] if red is not None else v
            for j, rep in enumerate(self.representatives):
                if self.rep_degrees[j] != n:
                    continue
                p = min(rep)
                if y.get(p):
                    out[j] = y[p]
        return out


def cohomology(p: AlgebraPresentation, check_representatives: bool = True) -> Cohomology:
    sp = p.space
    if p.differential is not None:
        for i in range(sp.dim):
            if p.d(p.d(_e(i))):
                raise ValueError("differential does not square to zero")
    reps: List[Vec] = []
    rep_deg: List[int] = []
    betti, kdim, idim = {}, {}, {}
    images: Dict[int, Reducer] = {}
    for n in sp.occupied_degrees():
        idx = sp.in_degree(n)
        cols = [p.d(_e(i)) for i in idx]
        res = solve_exact(cols)
        kernel = [{idx[j]: c for j, c in kv.items()} for kv in res.kernel]
        src = sp.in_degree(n - 1)
        img = Reducer()
        for i in src:
            img.add(p.d(_e(i)))
        images[n] = img
        residues = Reducer()
        for kv in kernel:
            residues.add(img.reduce(kv)[0])
        new = residues.basis()
        reps.extend(new)
        rep_deg.extend([n] * len(new))
        betti[n] = len(new)
        kdim[n] = len(kernel)
        idim[n] = len(img)
    coh = Cohomology(sp, reps, rep_deg, betti, kdim, idim, {}, images)
    coh.product = induced_product(p, coh, reps)
    if check_representatives and p.differential is not None:
        other = perturbed_representatives(p, coh)
        if induced_product(p, coh, other) != coh.product:
            raise AssertionError("induced product depends on the representative choice")
    return coh


def induced_product(p: AlgebraPresentation, coh: Cohomology, reps: List[Vec]):
    table = {}
    for i, x in enumerate(reps):
        for j, y in enumerate(reps):
            v = coh.quotient(p.mul(x, y))
            if v:
                table[(i, j)] = v
    return table


def perturbed_representatives(p: AlgebraPresentation, coh: Cohomology) -> List[Vec]:
    """Representatives shifted by a coboundary wherever one is available."""
    out = []
    for rep, n in zip(coh.representatives, coh.rep_degrees):
        src = p.space.in_degree(n - 1)
        shifted = dict(rep)
        for i in src:
            dv = p.d(_e(i))
            if dv:
                axpy(shifted, dv, 1)
                break
        out.append(shifted)
    return out


def adjoint_action(p: AlgebraPresentation, a: Vec) -> GradedMap:
    """Matrix of ``b -> [a, b]`` (or ``[a•b]``)."""
    if p.bracket is None:
        raise ValueError("no bracket")
    deg = vec_degree(p.space, a)
    deg = (deg if deg is not None else 0) + p.bracket.degree
    cols = {j: p.br(a, _e(j)) for j in range(p.dim)}
    return GradedMap(p.space, p.space, deg, cols)
