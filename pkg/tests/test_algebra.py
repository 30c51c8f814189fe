from fractions import Fraction

import pytest

from hptk.algebra import (
    AlgebraPresentation,
    Bracket,
    adjoint_action,
    bracket_from_delta,
    check_dga,
    check_dgla,
    check_gbv,
    check_gerstenhaber,
    check_poisson,
    cohomology,
)
from hptk.graded import GradedMap, GradedSpace
from hptk.models import Exterior, d2, exterior_model, h3ce, h3gbv, mat2, t2, theta_counterexample

F = Fraction


def lie(entries):
    sp = GradedSpace((("e1", 0), ("e2", 0), ("e3", 0)))
    br = {}
    for (a, b), v in entries.items():
        br[(a, b)] = v
        br[(b, a)] = {k: -c for k, c in v.items()}
    return AlgebraPresentation(sp, bracket=Bracket(br))


def test_corpus_validators():
    for p in (t2(), d2(), h3ce()):
        assert check_dga(p).passed
    assert check_poisson(mat2()).passed
    assert check_gbv(h3gbv()).passed
    g = h3gbv()
    assert check_gerstenhaber(g.with_bracket(bracket_from_delta(g))).passed


def test_leibniz_defect_has_witness():
    p = h3ce()
    sp = p.space
    cols = dict(p.differential.columns)
    cols[sp.index("ac")] = {sp.index("abc"): F(1)}
    bad = p.with_differential(GradedMap(sp, sp, 1, cols))
    rep = check_dga(bad)
    law = rep.law("d_leibniz")
    assert not law.passed
    w = [x for x in law.witnesses if x.inputs == ("a", "c")][0]
    assert w.defect == {"abc": F(1)}


def test_dgla_examples():
    assert check_dgla(lie({})).passed
    heis = lie({(0, 1): {2: F(1)}})
    assert check_dgla(heis).passed
    # sl(2)-type structure constants satisfy Jacobi
    assert check_dgla(lie({(0, 1): {2: F(1)}, (1, 2): {0: F(1)}, (0, 2): {1: F(1)}})).passed
    broken = check_dgla(lie({(0, 1): {2: F(1)}, (0, 2): {0: F(1)}}))
    assert not broken.law("jacobi").passed
    assert broken.law("jacobi").witnesses


def test_commutator_bracket_is_poisson():
    from hptk.cli import commutator_bracket

    p = mat2()
    q = p.with_bracket(commutator_bracket(p))
    assert q.bracket.entries == p.bracket.entries
    assert check_poisson(t2().with_bracket(Bracket({}))).passed


def test_bracket_from_delta_values():
    g = h3gbv()
    sp = g.space
    br = bracket_from_delta(g)
    e1, e2, e3 = (sp.index(s) for s in ("e1", "e2", "e3"))
    assert br.entries[(e1, e2)] == {e3: F(-1)}
    unit = sp.index("1")
    assert all((unit, j) not in br.entries for j in range(sp.dim))
    zero = AlgebraPresentation(sp, g.product, None, unit, bv_operator=GradedMap(sp, sp, 1, {}))
    assert bracket_from_delta(zero).entries == {}
    ext = Exterior([("t", 1), ("s", 1)])
    sp2 = ext.space
    delta = GradedMap(sp2, sp2, 1, {0: {sp2.index("t"): F(1)}, sp2.index("t"): {sp2.index("ts"): F(1)}})
    with pytest.raises(ValueError):
        bracket_from_delta(AlgebraPresentation(sp2, ext.product(), None, 0, bv_operator=delta))


def test_adjoint_action():
    g = h3gbv()
    q = g.with_bracket(bracket_from_delta(g))
    sp = q.space
    ad = adjoint_action(q, {sp.index("e1"): F(1)})
    assert ad.apply({sp.index("e2"): F(1)}) == {sp.index("e3"): F(-1)}
    assert ad.apply({sp.index("e1"): F(1)}) == {}
    assert ad.apply({sp.index("e3"): F(1)}) == {}


def test_theta_counterexample_rejected():
    rep = check_gbv(theta_counterexample())
    assert not rep.passed
    wit = [w for w in rep.law("leibniz").witnesses if w.inputs == ("t1", "t2", "t2")]
    assert wit and wit[0].defect == {"t2": F(2)}
    assert not rep.law("delta_odd").passed


def test_gbv_with_zero_delta_passes():
    p = exterior_model("L", [("u", 1), ("v", 1)])
    q = AlgebraPresentation(p.space, p.product, None, p.unit,
                            bv_operator=GradedMap(p.space, p.space, 1, {}))
    assert check_gbv(q).passed


def test_cohomology_examples():
    h = cohomology(h3ce())
    assert [h.betti[k] for k in sorted(h.betti)] == [1, 2, 2, 1]
    sp = h3ce().space
    a = h.quotient({sp.index("a"): F(1)})
    b = h.quotient({sp.index("b"): F(1)})
    (ia,), (ib,) = a, b
    assert (ia, ib) not in h.product
    assert sum(cohomology(d2()).betti.values()) == 0
    assert cohomology(t2()).betti == {0: 1, 1: 2, 2: 1}


def test_degree_checks():
    sp = GradedSpace((("x", 1), ("y", 1)))
    with pytest.raises(ValueError):
        AlgebraPresentation(sp, {(0, 1): {0: F(1)}})
    with pytest.raises(ValueError):
        Bracket({}, shift=0, degree=1)
