"""Basic perturbation lemma and the deformation pipelines built on it.

Big and small complexes here are ``A ⊗ R`` and ``H ⊗ R`` where ``R`` is a
truncated tensor or symmetric algebra on the dual generators. Keys are pairs
``(index, word)``; every map is a callable on sparse dicts over those keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Dict, Hashable, List, Optional

from .algebra import AlgebraPresentation, LawResult, StructureReport, WITNESS_LIMIT, Witness
from .coalgebra import stasheff_sum
from .graded import TENSOR
from .linalg import Vec, add_term, axpy
from .splitting import SDRData, Splitting, make_sdr, verify_sdr
from .transfer import (
    SeriesRing,
    TransferResult,
    TreeTransfer,
    chen_transfer,
    extract_infinity,
    hain_transfer,
)

Op = Callable[[Vec], Vec]


class PerturbationError(RuntimeError):
    pass


def sgn(e: int) -> int:
    return -1 if e % 2 else 1


def _unit(k) -> Vec:
    return {k: Fraction(1)}


def memoized(op: Op) -> Op:
    """Linear extension of ``op`` with per-key caching."""
    cache: Dict[Hashable, Vec] = {}

    def run(v: Vec) -> Vec:
        out: Vec = {}
        for k, c in v.items():
            r = cache.get(k)
            if r is None:
                r = op(_unit(k))
                cache[k] = r
            axpy(out, r, c)
        return out

    return run


def coefficientwise(fn: Callable[[Vec], Vec]) -> Op:
    """Extend a map on ``A`` to ``A ⊗ R`` acting on the left factor."""

    def run(v: Vec) -> Vec:
        out: Vec = {}
        for (i, u), c in v.items():
            for k, e in fn(_unit(i)).items():
                add_term(out, (k, u), c * e)
        return out

    return run


# ---------------------------------------------------------------------------
# tensored SDR


@dataclass
class TensoredSDR:
    ring: SeriesRing
    sdr: SDRData
    base: SDRData


def tensor_sdr(split: Splitting, ring: SeriesRing) -> TensoredSDR:
    base = make_sdr(split)
    words = ring.R.words()
    nA, nH = split.parent.dim, split.hspace.dim
    big = [(i, u) for u in words for i in range(nA)]
    small = [(j, u) for u in words for j in range(nH)]
    A, H, R = split.parent.space, split.hspace, ring.R

    def lab(space):
        return lambda key: f"{space.symbol(key[0])}*{R.format(key[1])}"

    sdr = SDRData(
        small=small,
        big=big,
        d_small=lambda v: {},
        d_big=coefficientwise(base.d_big),
        nabla=coefficientwise(base.nabla),
        f=coefficientwise(base.f),
        phi=coefficientwise(base.phi),
        label_small=lab(H),
        label_big=lab(A),
    )
    return TensoredSDR(ring, sdr, base)


# ---------------------------------------------------------------------------
# initiators


@dataclass
class Initiator:
    t: Op
    name: str
    weight: int = 1


def derivation_initiator(ring: SeriesRing, images, name: str) -> Initiator:
    """``alpha u -> (-1)^{|alpha|_L} alpha D(u)``."""
    return Initiator(lambda v: ring.derive(images, v), name)


def hain_initiator(ring: SeriesRing, res: TransferResult, with_adjoint: bool = True) -> Initiator:
    images = res.derivation.images
    omega = res.omega

    def t(v: Vec) -> Vec:
        out = ring.derive(images, v)
        if with_adjoint:
            axpy(out, ring.bracket(omega, v))
        return out

    return Initiator(t, "dL+ad_omegaL" if with_adjoint else "dL")


def zero_initiator() -> Initiator:
    return Initiator(lambda v: {}, "zero")


def initiator_report(ring: SeriesRing, sdr: SDRData, init: Initiator,
                     check_derivation: bool = True) -> StructureReport:
    """Square-zero, filtration and (optionally) derivation checks for ``t``."""
    t = memoized(init.t)
    d = sdr.d_big
    keys = sdr.big
    laws = []
    lab = sdr.label_big

    def law(name, items, fn, label):
        checked = fails = 0
        wits = []
        for it in items:
            checked += 1
            v = fn(it)
            if v:
                fails += 1
                if len(wits) < WITNESS_LIMIT:
                    wits.append(Witness(label(it), {lab(k): c for k, c in sorted(v.items(), key=_kord)}))
        laws.append(LawResult(name, checked, fails, wits))

    def square(k):
        e = _unit(k)
        x = axpy(d(e), t(e))
        return axpy(d(x), t(x))

    law("d_plus_t_squared", keys, square, lambda k: (lab(k),))

    def raises(k):
        return {key: c for key, c in t(_unit(k)).items() if len(key[1]) < len(k[1]) + init.weight}

    law("t_raises_word_length", keys, raises, lambda k: (lab(k),))
    if check_derivation:
        mul = ring.mul
        deg = ring.key_degree
        gens = _algebra_generators(ring)

        def leibniz(pair):
            x, y = _unit(pair[0]), _unit(pair[1])
            v = t(mul(x, y))
            axpy(v, mul(t(x), y), -1)
            axpy(v, mul(x, t(y)), -sgn(deg(pair[0])))
            return v

        pairs = [(a, b) for a in gens for b in keys] + [(a, b) for a in keys for b in gens]
        law("t_is_derivation", pairs, leibniz, lambda pr: (lab(pr[0]), lab(pr[1])))
    return StructureReport(laws)


def _algebra_generators(ring: SeriesRing):
    """``A ⊗ 1`` together with ``1 ⊗ X^j`` (when A is unital) generate ``A ⊗ R``."""
    gens = [(i, ()) for i in range(ring.p.dim)]
    if ring.p.unit is not None:
        gens += [(ring.p.unit, (j,)) for j in range(ring.R.ngens)]
    else:
        gens = ring.keys()
    return gens


def _kord(item):
    return repr(item[0])


# ---------------------------------------------------------------------------
# basic perturbation lemma


@dataclass
class BPLResult:
    sdr: SDRData
    stages: int
    sigma: Op
    stage_report: StructureReport
    input_sdr: SDRData
    initiator: Initiator


def run_bpl(sdr: SDRData, init: Initiator, max_stage: int) -> BPLResult:
    """Perturb ``d_big`` by ``t``; returns the transferred SDR data.

    ``Sigma = sum_{n>=1} (t phi)^{n-1} t`` terminates because ``t`` raises word
    length and ``phi`` preserves it. Stage ``n`` partial sums are recorded to
    check stabilization on the basis.
    """
    t = memoized(init.t)
    phi = sdr.phi
    limit = max_stage + 1

    def sigma_terms(v: Vec) -> List[Vec]:
        terms = []
        y = t(v)
        while y:
            terms.append(y)
            if len(terms) > limit:
                raise PerturbationError("perturbation series did not stabilize")
            y = t(phi(y))
        return terms

    cache: Dict[Hashable, List[Vec]] = {}

    def terms_of(k):
        if k not in cache:
            cache[k] = sigma_terms(_unit(k))
        return cache[k]

    def sigma(v: Vec) -> Vec:
        out: Vec = {}
        for k, c in v.items():
            for term in terms_of(k):
                axpy(out, term, c)
        return out

    def sigma_n(v: Vec, n: int) -> Vec:
        out: Vec = {}
        for k, c in v.items():
            for term in terms_of(k)[:n]:
                axpy(out, term, c)
        return out

    nabla, f, d_small = sdr.nabla, sdr.f, sdr.d_small
    D = memoized(lambda v: axpy(d_small(v), f(sigma(nabla(v)))))
    nabla_inf = memoized(lambda v: axpy(nabla(v), phi(sigma(nabla(v)))))
    f_inf = memoized(lambda v: axpy(f(v), f(sigma(phi(v)))))
    phi_inf = memoized(lambda v: axpy(phi(v), phi(sigma(phi(v)))))
    d_big = sdr.d_big
    new = SDRData(
        small=sdr.small,
        big=sdr.big,
        d_small=D,
        d_big=memoized(lambda v: axpy(d_big(v), t(v))),
        nabla=nabla_inf,
        f=f_inf,
        phi=phi_inf,
        label_small=sdr.label_small,
        label_big=sdr.label_big,
    )
    stages = max((len(terms_of(k)) for k in sdr.big), default=0)
    # stabilization: stage-n and stage-(n-1) transferred differentials agree
    # in every output word length below n
    laws = []
    for n in range(1, max(stages, max_stage) + 1):
        fails, wits = 0, []
        for k in sdr.small:
            e = _unit(k)
            a = f(sigma_n(nabla(e), n))
            b = f(sigma_n(nabla(e), n - 1))
            diff = {key: c for key, c in axpy(a, b, -1).items() if len(key[1]) - len(k[1]) < n}
            if diff:
                fails += 1
                if len(wits) < WITNESS_LIMIT:
                    wits.append(Witness((sdr.label_small(k),), {sdr.label_small(x): c for x, c in diff.items()}))
        laws.append(LawResult(f"stage{n}_stable_below_length_{n}", len(sdr.small), fails, wits))
    tail_nonzero = sum(1 for k in sdr.big if len(terms_of(k)) > max_stage)
    laws.append(LawResult(f"stabilized_by_stage_{max_stage}", len(sdr.big), tail_nonzero, []))
    return BPLResult(new, stages, sigma, StructureReport(laws), sdr, init)


def sdr_equal(a: SDRData, b: SDRData) -> bool:
    return a.matrices() == b.matrices()


def differential_square_report(sdr: SDRData) -> StructureReport:
    laws = []
    for name, op, keys, lab in (
        ("D_small_squared", sdr.d_small, sdr.small, sdr.label_small),
        ("d_big_squared", sdr.d_big, sdr.big, sdr.label_big),
    ):
        fails, wits = 0, []
        for k in keys:
            v = op(op(_unit(k)))
            if v:
                fails += 1
                if len(wits) < WITNESS_LIMIT:
                    wits.append(Witness((lab(k),), {lab(x): c for x, c in sorted(v.items(), key=_kord)}))
        laws.append(LawResult(name, len(keys), fails, wits))
    return StructureReport(laws)


# ---------------------------------------------------------------------------
# deformed A∞ structure on H ⊗ R


@dataclass
class DeformedStructure:
    """Transferred structure on ``H ⊗ R`` evaluated lazily on basis tuples."""

    ring: SeriesRing
    tree: TreeTransfer
    small_degree: Callable
    hdim: int
    arity: int

    def m(self, word) -> Vec:
        return self.tree.m(tuple(word))

    def table(self) -> Dict[tuple, Vec]:
        """``m_n(alpha_I ⊗ 1)`` for ``2 <= n <= arity`` plus ``m_1`` on ``H ⊗ 1``."""
        out = {}
        for n in range(1, self.arity + 1):
            for w in cartesian(range(self.hdim), repeat=n):
                word = tuple((j, ()) for j in w)
                v = self.m(word)
                if v:
                    out[word] = v
        return out

    def stasheff_report(self) -> StructureReport:
        laws = []
        for n in range(1, self.arity + 1):
            fails, wits, checked = 0, [], 0
            for w in cartesian(range(self.hdim), repeat=n):
                word = tuple((j, ()) for j in w)
                checked += 1
                v = stasheff_sum(self.m, self.small_degree, word)
                v = {k: c for k, c in v.items() if len(k[1]) <= self.ring.N}
                if v:
                    fails += 1
                    if len(wits) < WITNESS_LIMIT:
                        hs = self.ring.split.hspace
                        wits.append(Witness(
                            tuple(hs.symbol(j) for j in w),
                            {f"{hs.symbol(k[0])}*{self.ring.R.format(k[1])}": c for k, c in v.items()},
                        ))
            laws.append(LawResult(f"coefficientwise_stasheff_n{n}", checked, fails, wits))
        return StructureReport(laws)


def deformed_structure(ring: SeriesRing, sdr: SDRData, arity: int) -> DeformedStructure:
    H = ring.split.hspace
    R = ring.R

    def small_degree(key):
        return H.degree(key[0]) + R.degree(key[1])

    tree = TreeTransfer(small_degree, ring.key_degree, ring.mul,
                        sdr.nabla, sdr.f, sdr.phi, d_small=sdr.d_small)
    return DeformedStructure(ring, tree, small_degree, H.dim, arity)


# ---------------------------------------------------------------------------
# pipelines


@dataclass
class DeformationResult:
    stage_one: TransferResult
    lie: Optional[TransferResult]
    ring: SeriesRing
    tensored: TensoredSDR
    initiator: Initiator
    bpl: BPLResult
    structure: DeformedStructure
    report: StructureReport
    params: Dict[str, object] = field(default_factory=dict)


def _pipeline(p, split, stage_one, lie, ring, init, arity, params, check_derivation=True):
    tens = tensor_sdr(split, ring)
    report = StructureReport()
    report.extend(_prefix("tensored_sdr", verify_sdr(tens.sdr)))
    report.extend(_prefix("initiator", initiator_report(ring, tens.sdr, init, check_derivation)))
    if not report.passed:
        return DeformationResult(stage_one, lie, ring, tens, init, None, None, report, params)
    bpl = run_bpl(tens.sdr, init, ring.N)
    report.extend(_prefix("bpl", bpl.stage_report))
    report.extend(_prefix("bpl_sdr", verify_sdr(bpl.sdr)))
    report.extend(_prefix("bpl", differential_square_report(bpl.sdr)))
    st = deformed_structure(ring, bpl.sdr, arity)
    report.extend(st.stasheff_report())
    return DeformationResult(stage_one, lie, ring, tens, init, bpl, st, report, params)


def _prefix(pre: str, rep: StructureReport) -> StructureReport:
    return StructureReport([replace(l, name=f"{pre}.{l.name}") for l in rep.laws])


def deform_dga(p: AlgebraPresentation, split: Splitting, N: int, N2: int) -> DeformationResult:
    """Stage two over ``A ⊗ T(X)``: initiator ``partial^a``, then tree transfer."""
    stage_one = chen_transfer(p, split, N)
    ring = SeriesRing(p, split, TENSOR, N2)
    images = {j: {w: c for w, c in img.items() if len(w) <= N2}
              for j, img in stage_one.derivation.images.items()}
    init = derivation_initiator(ring, images, "partial_a")
    return _pipeline(p, split, stage_one, None, ring, init, N,
                     {"N_tensor": N, "N_coeff": N2})


def deform_poisson_gerstenhaber(p: AlgebraPresentation, split: Splitting, N_tensor: int,
                                N_sym: int, initiator: str = "aL") -> DeformationResult:
    if p.bracket is None:
        raise ValueError("deformation needs a bracket")
    if initiator not in ("aL", "L"):
        raise ValueError("initiator must be 'aL' or 'L'")
    stage_one = chen_transfer(p, split, N_tensor)
    lie = hain_transfer(p, split, N_sym)
    ring = lie.ring
    init = hain_initiator(ring, lie, with_adjoint=(initiator == "aL"))
    return _pipeline(p, split, stage_one, lie, ring, init, N_tensor,
                     {"N_tensor": N_tensor, "N_sym": N_sym, "initiator": initiator})


def promoted_table(res: TransferResult, arity: int) -> Dict[tuple, Vec]:
    """Stage-one ``m_n`` (``n >= 2``) with coefficients promoted to ``H ⊗ 1``."""
    m = extract_infinity(res)
    out = {}
    for w, v in m.maps.items():
        if 2 <= len(w) <= arity:
            out[tuple((j, ()) for j in w)] = {(k, ()): c for k, c in v.items()}
    return out
