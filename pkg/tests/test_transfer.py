from fractions import Fraction

from hptk.algebra import Bracket, AlgebraPresentation
from hptk.coalgebra import Derivation, check_linfty
from hptk.graded import GradedSpace
from hptk.models import d2, h3ce, mat2, t2
from hptk.splitting import compute_splitting
from hptk.transfer import (
    TwistingCochain,
    chen_transfer,
    extract_infinity,
    hain_transfer,
    tree_ainfty,
    twisting_cochain,
    verify_flatness,
    verify_twisting_cochain,
)

F = Fraction


def heisenberg():
    p = h3ce()
    s = compute_splitting(p)
    return p, s, s.hspace


def test_zero_differential_is_formal():
    p = t2()
    res = chen_transfer(p, compute_splitting(p), 4)
    assert res.omega == res.ring.omega_one()
    m = extract_infinity(res)
    H = res.ring.hspace
    x, y, xy = (H.index(s) for s in ("[x]", "[y]", "[xy]"))
    assert m.m((x, y)) == {xy: F(1)} and m.m((y, x)) == {xy: F(-1)}
    assert not any(m.arity(3).values()) and not any(m.arity(4).values())
    assert verify_twisting_cochain(twisting_cochain(res)).passed


def test_acyclic_is_empty():
    res = chen_transfer(d2(), compute_splitting(d2()), 3)
    assert res.omega == {} and res.derivation.images == {}
    assert extract_infinity(res).maps == {}


def test_heisenberg_omega_two_and_massey():
    p, s, H = heisenberg()
    res = chen_transfer(p, s, 3)
    sp = p.space
    two = res.omega_length(2)
    assert {k[0] for k in two} == {sp.index("c")}
    assert any(len(w) == 3 for img in res.derivation.images.values() for w in img)
    m = extract_infinity(res)
    a, b, ac, bc = (H.index(x) for x in ("[a]", "[b]", "[ac]", "[bc]"))
    assert m.m((a, a, b)) == {ac: F(1)}
    assert m.m((a, b, b)) == {bc: F(-1)}
    assert m.m((a, b)) == {}


def test_flatness_and_defects():
    p, s, _ = heisenberg()
    res = chen_transfer(p, s, 3)
    assert verify_flatness(res).passed
    cut = {k: c for k, c in res.omega.items() if len(k[1]) != 2}
    bad = verify_flatness(res, omega=cut)
    assert not bad.passed
    flat = [l for l in bad.failed() if l.name.startswith("b_flat")][0]
    assert flat.witnesses[0].inputs == ("X[a]*X[b]",)
    assert flat.witnesses[0].defect == {"ab": F(1)}
    j, img = next((j, img) for j, img in res.derivation.images.items() if img)
    flipped = dict(res.derivation.images)
    w0 = next(iter(img))
    flipped[j] = dict(img)
    flipped[j][w0] = -img[w0]
    der = Derivation(res.derivation.degrees, res.derivation.flavor, 1, flipped, res.N)
    assert not verify_flatness(res, der=der).passed


def test_tree_formula_agrees_with_induction():
    for p in (h3ce(), t2(), mat2()):
        s = compute_splitting(p)
        m = extract_infinity(chen_transfer(p, s, 4))
        assert tree_ainfty(p, s, 4).maps == m.maps


def test_twisting_cochain_defect():
    p, s, _ = heisenberg()
    tc = twisting_cochain(chen_transfer(p, s, 3))
    assert verify_twisting_cochain(tc).passed
    w = next(w for w in tc.values if len(w) == 2)
    dropped = TwistingCochain(tc.ring, {k: v for k, v in tc.values.items() if k != w}, tc.coderivation)
    rep = verify_twisting_cochain(dropped)
    assert not rep.passed
    assert rep.laws[0].witnesses


def test_heisenberg_lie_transfer():
    sp = GradedSpace((("e1", 0), ("e2", 0), ("e3", 0)))
    br = {(0, 1): {2: F(1)}, (1, 0): {2: F(-1)}}
    p = AlgebraPresentation(sp, bracket=Bracket(br))
    res = hain_transfer(p, compute_splitting(p), 3)
    assert verify_flatness(res).passed
    l = extract_infinity(res)
    assert l.l((0, 1)) == {2: F(1)}
    assert not any(l.arity(3).values())
    assert check_linfty(l, 3).passed


def test_abelian_and_matrix_lie_transfer():
    p = h3ce().with_bracket(Bracket({}))
    res = hain_transfer(p, compute_splitting(p), 3)
    assert res.omega == res.ring.omega_one() and res.derivation.images == {}
    q = mat2()
    res = hain_transfer(q, compute_splitting(q), 3)
    assert verify_flatness(res).passed
    assert check_linfty(extract_infinity(res), 3).passed
