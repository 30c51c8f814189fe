from fractions import Fraction

from hypothesis import given, strategies as st

from hptk.linalg import NOT_IN_IMAGE, Reducer, axpy, dense_det, rank, solve_exact

F = Fraction
small = st.integers(-3, 3).map(Fraction)


def test_solve_exact_examples():
    r = solve_exact([{}])
    assert r.kernel == [{0: F(1)}] and r.image == [] and r.rank == 0
    r = solve_exact([{"y": F(1)}], [{"y": F(1)}, {"z": F(1)}])
    assert r.kernel == [] and r.image == [{"y": F(1)}]
    assert r.preimages[0] == {0: F(1)}
    assert r.preimages[1] is NOT_IN_IMAGE


def test_heisenberg_degree_two_image():
    # d on degree 1 of H3CE: a, b -> 0, c -> ab
    r = solve_exact([{}, {}, {"ab": F(1)}])
    assert r.image == [{"ab": F(1)}]
    assert len(r.kernel) == 2


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(small, min_size=3, max_size=3))
def test_preimages_and_kernel_are_exact(cols, target):
    columns = [{i: c for i, c in enumerate(col) if c} for col in cols]
    t = {i: c for i, c in enumerate(target) if c}
    r = solve_exact(columns, [t])

    def apply(x):
        out = {}
        for j, c in x.items():
            axpy(out, columns[j], c)
        return out

    for k in r.kernel:
        assert apply(k) == {}
    pre = r.preimages[0]
    if pre is not NOT_IN_IMAGE:
        assert apply(pre) == t
    assert r.rank + len(r.kernel) == len(columns)
    assert rank(columns) == r.rank


def test_reducer_membership():
    red = Reducer()
    red.add({0: F(1), 1: F(2)})
    assert red.contains({0: F(2), 1: F(4)})
    assert not red.contains({1: F(1)})


def test_dense_det():
    assert dense_det([[F(2), F(1)], [F(1), F(1)]]) == 1
