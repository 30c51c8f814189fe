"""Cohomological splittings, Hodge data and strong deformation retracts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Sequence

from .algebra import (
    AlgebraPresentation,
    LawResult,
    StructureReport,
    WITNESS_LIMIT,
    Witness,
)
from .graded import GradedMap, GradedSpace
from .linalg import NOT_IN_IMAGE, Reducer, Vec, axpy, dense_det, solve_exact


class SplittingError(ValueError):
    pass


def _e(i):
    return {i: Fraction(1)}


def _coordinates(basis: Sequence[Vec], vec: Vec) -> Dict[int, Fraction]:
    res = solve_exact(basis, [vec])
    pre = res.preimages[0]
    if pre is NOT_IN_IMAGE:
        raise SplittingError("vector outside the span of the chosen basis")
    return pre


def _label(vec: Vec, space: GradedSpace) -> str:
    p = min(vec)
    return f"[{space.symbol(p)}]"


@dataclass
class Splitting:
    """``A = H + dM + M`` with homotopy ``Q`` (degree -1).

    ``harmonic`` and ``complement`` are vectors in ``A``; ``hspace`` is the
    abstract graded space with one basis element per harmonic vector.
    """

    parent: AlgebraPresentation
    harmonic: List[Vec]
    complement: List[Vec]
    hspace: GradedSpace
    Q: GradedMap
    projection: GradedMap
    inclusion: GradedMap
    route: str = "echelon"

    def harmonic_part(self, vec: Vec) -> Vec:
        return self.inclusion.apply(self.projection.apply(vec))

    def betti(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for n in self.parent.space.occupied_degrees():
            out[n] = 0
        for d in self.hspace.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def verify(self) -> StructureReport:
        p, sp = self.parent, self.parent.space
        d = p.differential_or_zero()
        laws = []

        def law(name, keys, fn, label):
            checked = fails = 0
            wits = []
            for k in keys:
                checked += 1
                v = fn(k)
                if v:
                    fails += 1
                    if len(wits) < WITNESS_LIMIT:
                        wits.append(Witness((label(k),), {str(a): c for a, c in sorted(v.items())}))
            laws.append(LawResult(name, checked, fails, wits))

        hs = range(self.hspace.dim)
        law("harmonic_closed", hs, lambda j: d.apply(self.harmonic[j]), self.hspace.symbol)
        rk = Reducer()
        for m in self.complement:
            rk.add(d.apply(m))
        laws.append(LawResult("d_injective_on_M", 1, int(len(rk) != len(self.complement)), []))
        allb = list(self.harmonic) + [d.apply(m) for m in self.complement] + list(self.complement)
        rk = Reducer()
        for v in allb:
            rk.add(v)
        ok = len(rk) == sp.dim == len(allb)
        laws.append(LawResult("direct_sum", 1, int(not ok), []))

        def homotopy(i):
            e = _e(i)
            v = dict(e)
            axpy(v, d.apply(self.Q.apply(e)), -1)
            axpy(v, self.Q.apply(d.apply(e)), -1)
            axpy(v, self.harmonic_part(e), -1)
            return v

        every = range(sp.dim)
        law("one_minus_dQ_plus_Qd_is_projection", every, homotopy, sp.symbol)
        law("Q_squared", every, lambda i: self.Q.apply(self.Q.apply(_e(i))), sp.symbol)
        law("Q_on_H", hs, lambda j: self.Q.apply(self.harmonic[j]), self.hspace.symbol)
        law("projection_of_Q", every, lambda i: self.projection.apply(self.Q.apply(_e(i))), sp.symbol)
        return StructureReport(laws)


def _assemble(p: AlgebraPresentation, harmonic, complement, route) -> Splitting:
    sp = p.space
    d = p.differential_or_zero()
    hspace = GradedSpace(tuple(
        (_label(h, sp), sp.degree(min(h))) for h in harmonic
    ))
    hdeg = [sp.degree(min(h)) for h in harmonic]
    mdeg = [sp.degree(min(m)) for m in complement]
    qcols: Dict[int, Vec] = {}
    pcols: Dict[int, Vec] = {}
    for n in sp.occupied_degrees():
        hs = [j for j, g in enumerate(hdeg) if g == n]
        dm = [j for j, g in enumerate(mdeg) if g == n - 1]
        ms = [j for j, g in enumerate(mdeg) if g == n]
        cols = (
            [harmonic[j] for j in hs]
            + [d.apply(complement[j]) for j in dm]
            + [complement[j] for j in ms]
        )
        idx = sp.in_degree(n)
        if len(cols) != len(idx):
            raise SplittingError(f"degree {n}: pieces do not add up to the whole space")
        res = solve_exact(cols, [_e(i) for i in idx])
        for i, coords in zip(idx, res.preimages):
            if coords is NOT_IN_IMAGE:
                raise SplittingError(f"degree {n}: pieces do not span")
            pv = {hs[k]: c for k, c in coords.items() if k < len(hs)}
            qv: Vec = {}
            for k, c in coords.items():
                if len(hs) <= k < len(hs) + len(dm):
                    axpy(qv, complement[dm[k - len(hs)]], c)
            if pv:
                pcols[i] = pv
            if qv:
                qcols[i] = qv
    Q = GradedMap(sp, sp, -1, qcols)
    proj = GradedMap(sp, hspace, 0, pcols)
    incl = GradedMap(hspace, sp, 0, {j: dict(h) for j, h in enumerate(harmonic)})
    return Splitting(p, harmonic, complement, hspace, Q, proj, incl, route)


def _check_square_zero(p: AlgebraPresentation) -> None:
    for i in range(p.dim):
        if p.d(p.d(_e(i))):
            raise SplittingError(f"differential does not square to zero on {p.space.symbol(i)!r}")


def compute_splitting(p: AlgebraPresentation) -> Splitting:
    """Echelon splitting: harmonic = reduced kernel residues modulo the image."""
    _check_square_zero(p)
    sp = p.space
    harmonic: List[Vec] = []
    complement: List[Vec] = []
    for n in sp.occupied_degrees():
        idx = sp.in_degree(n)
        res = solve_exact([p.d(_e(i)) for i in idx])
        kernel = Reducer()
        for kv in res.kernel:
            kernel.add({idx[j]: c for j, c in kv.items()})
        img = Reducer()
        for i in sp.in_degree(n - 1):
            img.add(p.d(_e(i)))
        residues = Reducer()
        for kv in kernel.basis():
            residues.add(img.reduce(kv)[0])
        harmonic.extend(residues.basis())
        pivots = set(kernel.pivot_keys())
        complement.extend(_e(i) for i in idx if i not in pivots)
    return _assemble(p, harmonic, complement, "echelon")


# ---------------------------------------------------------------------------
# Hodge route


@dataclass
class HodgeData:
    gram: Dict[int, List[List[Fraction]]]
    dstar: GradedMap
    laplacian: GradedMap
    green: GradedMap

    def verify(self, p: AlgebraPresentation, split: Splitting) -> StructureReport:
        sp = p.space
        d = p.differential_or_zero()
        ds, box, G = self.dstar, self.laplacian, self.green
        laws = []

        def inner(x: Vec, y: Vec) -> Fraction:
            tot = Fraction(0)
            for i, a in x.items():
                n = sp.degree(i)
                idx = sp.in_degree(n)
                row = self.gram[n][idx.index(i)]
                for j, b in y.items():
                    if sp.degree(j) == n:
                        tot += a * b * row[idx.index(j)]
            return tot

        fails, wits, checked = 0, [], 0
        for i in range(sp.dim):
            for j in sp.in_degree(sp.degree(i) + 1):
                checked += 1
                diff = inner(d.apply(_e(i)), _e(j)) - inner(_e(i), ds.apply(_e(j)))
                if diff:
                    fails += 1
                    if len(wits) < WITNESS_LIMIT:
                        wits.append(Witness((sp.symbol(i), sp.symbol(j)), {"defect": diff}))
        laws.append(LawResult("adjoint", checked, fails, wits))

        def per_basis(name, fn):
            checked = fails = 0
            wits = []
            for i in range(sp.dim):
                checked += 1
                v = fn(_e(i))
                if v:
                    fails += 1
                    if len(wits) < WITNESS_LIMIT:
                        wits.append(Witness((sp.symbol(i),), {sp.symbol(k): c for k, c in sorted(v.items())}))
            laws.append(LawResult(name, checked, fails, wits))

        def box_formula(e):
            v = box.apply(e)
            axpy(v, d.apply(ds.apply(e)), -1)
            axpy(v, ds.apply(d.apply(e)), -1)
            return v

        def green_left(e):
            perp = axpy(dict(e), split.harmonic_part(e), -1)
            return axpy(G.apply(box.apply(e)), perp, -1)

        def green_right(e):
            perp = axpy(dict(e), split.harmonic_part(e), -1)
            return axpy(box.apply(G.apply(e)), perp, -1)

        per_basis("laplacian_formula", box_formula)
        per_basis("green_left_inverse", green_left)
        per_basis("green_right_inverse", green_right)
        per_basis("green_commutes_d", lambda e: axpy(G.apply(d.apply(e)), d.apply(G.apply(e)), -1))
        per_basis("green_commutes_dstar", lambda e: axpy(G.apply(ds.apply(e)), ds.apply(G.apply(e)), -1))

        def decomposition(e):
            v = axpy(dict(e), split.harmonic_part(e), -1)
            axpy(v, d.apply(ds.apply(G.apply(e))), -1)
            axpy(v, ds.apply(G.apply(d.apply(e))), -1)
            return v

        per_basis("hodge_decomposition", decomposition)
        per_basis("Q_is_dstar_green", lambda e: axpy(split.Q.apply(e), ds.apply(G.apply(e)), -1))
        return StructureReport(laws)


def monomial_gram(space: GradedSpace) -> Dict[int, List[List[Fraction]]]:
    out = {}
    for n, k in space.dims_by_degree().items():
        out[n] = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    return out


def check_positive_definite(gram: Dict[int, List[List[Fraction]]], space: GradedSpace) -> None:
    for n, k in space.dims_by_degree().items():
        if n not in gram:
            raise SplittingError(f"inner product missing for degree {n}")
        m = [[Fraction(x) for x in row] for row in gram[n]]
        if len(m) != k or any(len(r) != k for r in m):
            raise SplittingError(f"inner product for degree {n} must be {k}x{k}")
        for i in range(k):
            for j in range(k):
                if m[i][j] != m[j][i]:
                    raise SplittingError(f"inner product for degree {n} is not symmetric at ({i},{j})")
        for r in range(1, k + 1):
            minor = dense_det([row[:r] for row in m[:r]])
            if minor <= 0:
                raise SplittingError(
                    f"inner product for degree {n} is not positive definite: "
                    f"leading principal minor of order {r} is {minor}"
                )


def _inverse_dense(m: List[List[Fraction]]) -> List[List[Fraction]]:
    k = len(m)
    cols = [{i: m[i][j] for i in range(k) if m[i][j]} for j in range(k)]
    from .linalg import invert_square

    inv = invert_square(cols, list(range(k)))
    # inv[i] are coefficients c with sum_j c_j col_j = e_i, i.e. column i of M^-1
    return [[inv[j].get(i, Fraction(0)) for j in range(k)] for i in range(k)]


def hodge_splitting(p: AlgebraPresentation, gram=None):
    """Splitting by ``H = ker(box)``, ``M = im d*``, ``Q = d* G``."""
    _check_square_zero(p)
    sp = p.space
    if gram is None or gram == "monomial-orthonormal":
        gram = monomial_gram(sp)
    gram = {int(n): [[Fraction(x) for x in r] for r in rows] for n, rows in gram.items()}
    check_positive_definite(gram, sp)
    d = p.differential_or_zero()
    inv = {n: _inverse_dense(g) for n, g in gram.items()}
    # d*: A_{n+1} -> A_n,  d* = G_n^{-1} d^T G_{n+1}
    ds_cols: Dict[int, Vec] = {}
    for n in sp.occupied_degrees():
        src = sp.in_degree(n + 1)
        tgt = sp.in_degree(n)
        if not src or not tgt:
            continue
        gs = gram[n + 1]
        for b, j in enumerate(src):
            # (d^T G_{n+1} e_j)_a = sum_c d[c][a] G[c][b]
            w = []
            for a, i in enumerate(tgt):
                di = d.apply(_e(i))
                w.append(sum((di.get(c, 0) * gs[ci][b] for ci, c in enumerate(src)), Fraction(0)))
            gi = inv[n]
            col = {}
            for a, i in enumerate(tgt):
                v = sum((gi[a][c] * w[c] for c in range(len(tgt))), Fraction(0))
                if v:
                    col[i] = v
            if col:
                ds_cols[j] = col
    ds = GradedMap(sp, sp, -1, ds_cols)
    box = GradedMap(sp, sp, 0, {
        i: axpy(d.apply(ds.apply(_e(i))), ds.apply(d.apply(_e(i))))
        for i in range(sp.dim)
    })
    harmonic: List[Vec] = []
    complement: List[Vec] = []
    green_cols: Dict[int, Vec] = {}
    for n in sp.occupied_degrees():
        idx = sp.in_degree(n)
        res = solve_exact([box.apply(_e(i)) for i in idx])
        ker = Reducer()
        for kv in res.kernel:
            ker.add({idx[j]: c for j, c in kv.items()})
        harmonic.extend(ker.basis())
        im_ds = Reducer()
        for i in sp.in_degree(n + 1):
            im_ds.add(ds.apply(_e(i)))
        complement.extend(im_ds.basis())
        # Green operator: inverse of box on im(box), zero on ker(box)
        image = res.image
        kern = ker.basis()
        boxed = [box.apply(v) for v in image]
        split_basis = kern + image
        for i in idx:
            coords = _coordinates(split_basis, _e(i))
            perp: Vec = {}
            for k, c in coords.items():
                if k >= len(kern):
                    axpy(perp, image[k - len(kern)], c)
            if not perp:
                continue
            y = _coordinates(boxed, perp)
            g: Vec = {}
            for k, c in y.items():
                axpy(g, image[k], c)
            if g:
                green_cols[i] = g
    green = GradedMap(sp, sp, 0, green_cols)
    split = _assemble(p, harmonic, complement, "hodge")
    qd = ds.compose(green)
    if qd != split.Q:
        raise SplittingError("homotopy from the decomposition differs from d* G")
    return split, HodgeData(gram, ds, box, green)


# ---------------------------------------------------------------------------
# SDR


Op = Callable[[Vec], Vec]


@dataclass
class SDRData:
    """``(nabla, f, phi)`` between a small complex ``M`` and a big one ``A``.

    Maps are callables on sparse vectors, so the same record serves plain
    splittings and the coefficient-extended versions built later. ``small``
    and ``big`` enumerate basis keys; ``label`` renders a key.
    """

    small: List[Hashable]
    big: List[Hashable]
    d_small: Op
    d_big: Op
    nabla: Op
    f: Op
    phi: Op
    label_small: Callable[[Hashable], str] = str
    label_big: Callable[[Hashable], str] = str

    def matrices(self) -> Dict[str, Dict[Hashable, Vec]]:
        out = {}
        for name, op, keys in (
            ("d_small", self.d_small, self.small),
            ("d_big", self.d_big, self.big),
            ("nabla", self.nabla, self.small),
            ("f", self.f, self.big),
            ("phi", self.phi, self.big),
        ):
            cols = {}
            for k in keys:
                v = op({k: Fraction(1)})
                if v:
                    cols[k] = v
            out[name] = cols
        return out


def make_sdr(s: Splitting) -> SDRData:
    p = s.parent
    sp = p.space
    d = p.differential_or_zero()
    return SDRData(
        small=list(range(s.hspace.dim)),
        big=list(range(sp.dim)),
        d_small=lambda v: {},
        d_big=d.apply,
        nabla=s.inclusion.apply,
        f=s.projection.apply,
        phi=lambda v: {k: -c for k, c in s.Q.apply(v).items()},
        label_small=s.hspace.symbol,
        label_big=sp.symbol,
    )


def verify_sdr(sdr: SDRData) -> StructureReport:
    laws = []

    def law(name, keys, fn, label, out_label):
        checked = fails = 0
        wits = []
        for k in keys:
            checked += 1
            v = fn({k: Fraction(1)})
            if v:
                fails += 1
                if len(wits) < WITNESS_LIMIT:
                    defect = {_render(a, out_label): c for a, c in sorted(v.items(), key=_sort_key)}
                    wits.append(Witness((label(k),), defect))
        laws.append(LawResult(name, checked, fails, wits))

    small, big = sdr.small, sdr.big
    ls, lb = sdr.label_small, sdr.label_big
    law("SDR1_f_nabla", small, lambda e: axpy(sdr.f(sdr.nabla(e)), e, -1), ls, ls)

    def sdr2(e):
        v = sdr.nabla(sdr.f(e))
        axpy(v, e, -1)
        axpy(v, sdr.d_big(sdr.phi(e)), -1)
        axpy(v, sdr.phi(sdr.d_big(e)), -1)
        return v

    law("SDR2_nabla_f", big, sdr2, lb, lb)
    law("nabla_chain_map", small,
        lambda e: axpy(sdr.nabla(sdr.d_small(e)), sdr.d_big(sdr.nabla(e)), -1), ls, lb)
    law("f_chain_map", big,
        lambda e: axpy(sdr.f(sdr.d_big(e)), sdr.d_small(sdr.f(e)), -1), lb, ls)
    law("side_phi_nabla", small, lambda e: sdr.phi(sdr.nabla(e)), ls, lb)
    law("side_f_phi", big, lambda e: sdr.f(sdr.phi(e)), lb, ls)
    law("side_phi_squared", big, lambda e: sdr.phi(sdr.phi(e)), lb, lb)
    return StructureReport(laws)


def _sort_key(item):
    return repr(item[0])


def _render(key, label) -> str:
    try:
        return label(key)
    except Exception:
        return repr(key)
