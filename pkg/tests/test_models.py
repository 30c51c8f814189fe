from fractions import Fraction

import pytest

from hptk.models import Exterior, h3ce, h3gbv, mat2

F = Fraction


def test_exterior_signs():
    ext = Exterior([("a", 1), ("b", 1)])
    a, b, ab = (ext.mono(s) for s in ("a", "b", "ab"))
    assert ext.times(a, b) == {ab: F(1)}
    assert ext.times(b, a) == {ab: F(-1)}
    assert ext.times(a, a) == {}
    with pytest.raises(ValueError):
        Exterior([("x", 2)])


def test_heisenberg_differential():
    p = h3ce()
    sp = p.space
    assert p.d({sp.index("c"): F(1)}) == {sp.index("ab"): F(1)}
    assert p.d({sp.index("bc"): F(1)}) == {}
    assert p.d({sp.index("ac"): F(1)}) == {}


def test_gbv_and_matrix_models():
    g = h3gbv()
    sp = g.space
    assert g.delta({sp.index("e1e2"): F(1)}) == {sp.index("e3"): F(1)}
    assert set(sp.degrees) == {0, -1, -2, -3}
    m = mat2()
    s = m.space
    xi_e12 = s.index("xiE12")
    # d is bracketing with xi*E12, so d(E21) = xi*H
    assert m.d({s.index("E21"): F(1)}) == {s.index("xiH"): F(1)}
    assert m.d({xi_e12: F(1)}) == {}
