from fractions import Fraction

import pytest

from hptk.algebra import Bracket, bracket_from_delta
from hptk.graded import TENSOR
from hptk.models import d2, h3ce, h3gbv, mat2, t2
from hptk.perturbation import (
    Initiator,
    deform_dga,
    deform_poisson_gerstenhaber,
    derivation_initiator,
    differential_square_report,
    initiator_report,
    promoted_table,
    run_bpl,
    sdr_equal,
    tensor_sdr,
    zero_initiator,
)
from hptk.splitting import compute_splitting, verify_sdr
from hptk.transfer import SeriesRing, chen_transfer

F = Fraction


def tensored(p, n=2):
    s = compute_splitting(p)
    ring = SeriesRing(p, s, TENSOR, n)
    return s, ring, tensor_sdr(s, ring)


def test_tensored_sdr_verifies():
    for p in (h3ce(), mat2(), d2()):
        assert verify_sdr(tensored(p)[2].sdr).passed


def test_zero_initiator_is_identity():
    _, _, t = tensored(h3ce())
    out = run_bpl(t.sdr, zero_initiator(), 2)
    assert sdr_equal(out.sdr, t.sdr)
    assert out.stages == 0


def test_collapse_when_t_phi_vanishes():
    p = t2()
    s, ring, t = tensored(p)
    init = derivation_initiator(ring, chen_transfer(p, s, 3).derivation.images, "partial_a")
    out = run_bpl(t.sdr, init, 2)
    for k in t.sdr.small:
        e = {k: F(1)}
        assert out.sdr.d_small(e) == t.sdr.f(init.t(t.sdr.nabla(e)))


def test_heisenberg_stage_two():
    res = deform_dga(h3ce(), compute_splitting(h3ce()), 3, 2)
    assert res.report.passed
    names = [l.name for l in res.bpl.stage_report.laws]
    assert "stage1_stable_below_length_1" in names
    assert differential_square_report(res.bpl.sdr).passed


def test_not_a_derivation_is_caught():
    p = h3ce()
    s, ring, t = tensored(p)
    images = chen_transfer(p, s, 3).derivation.images

    def unsigned(v):
        out = {}
        for (i, u), c in v.items():
            for w, e in ring.R.apply_derivation(images, 1, u).items():
                out[(i, w)] = out.get((i, w), 0) + c * e
        return {k: c for k, c in out.items() if c}

    rep = initiator_report(ring, t.sdr, Initiator(unsigned, "unsigned"))
    law = rep.law("t_is_derivation")
    assert not law.passed
    assert len(law.witnesses[0].inputs) == 2


@pytest.mark.parametrize("initiator", ["aL", "L"])
def test_gerstenhaber_and_poisson_pipelines(initiator):
    g = h3gbv()
    for p in (g.with_bracket(bracket_from_delta(g)), mat2()):
        res = deform_poisson_gerstenhaber(p, compute_splitting(p), 3, 2, initiator)
        assert res.report.passed, [l.name for l in res.report.failed()]
        assert res.report.law("initiator.t_is_derivation").checked > 0


def test_adjoint_term_deforms_mat2():
    p = mat2()
    res = deform_poisson_gerstenhaber(p, compute_splitting(p), 3, 2, "aL")
    deformed = [k for v in res.structure.table().values() for k in v if k[1]]
    assert deformed


def test_zero_bracket_degenerates():
    for p in (t2(), h3ce()):
        q = p.with_bracket(Bracket({}))
        res = deform_poisson_gerstenhaber(q, compute_splitting(q), 3, 2)
        table = {k: v for k, v in res.structure.table().items() if len(k) >= 2}
        assert table == promoted_table(res.stage_one, 3)


def test_acyclic_everything_zero():
    res = deform_dga(d2(), compute_splitting(d2()), 3, 2)
    assert res.report.passed
    assert res.structure.table() == {}


def test_requires_bracket():
    with pytest.raises(ValueError):
        deform_poisson_gerstenhaber(h3ce(), compute_splitting(h3ce()), 3, 2)
