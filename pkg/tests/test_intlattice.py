from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from recurzeta import intlattice as il

rows_strategy = st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=1, max_size=5)


def sympy_rank(rows):
    return sympy.Matrix(rows).rank() if rows else 0


@given(rows_strategy)
def test_hnf_spans_same_lattice_and_has_full_rank(rows):
    h = il.hnf(rows)
    assert len(h) == sympy_rank(rows)
    for r in rows:
        assert il.contains(h, r)
    for v in h:
        # every HNF row is an integer combination of the input: rank does not grow
        assert sympy_rank(list(rows) + [list(v)]) == len(h)
    piv = il.pivots(h)
    assert piv == sorted(piv)
    for i, (row, p) in enumerate(zip(h, piv)):
        assert row[p] > 0
        for j in range(i):
            assert 0 <= h[j][p] < row[p]


@given(rows_strategy)
def test_hnf_is_canonical(rows):
    shuffled = list(reversed(rows)) + [[a + b for a, b in zip(rows[0], rows[-1])]]
    assert il.hnf(rows) == il.hnf(shuffled)


@given(rows_strategy)
def test_left_kernel(rows):
    ker = il.left_kernel(rows)
    assert len(ker) == len(rows) - sympy_rank(rows)
    for c in ker:
        assert all(sum(ci * r[j] for ci, r in zip(c, rows)) == 0 for j in range(4))


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=4, max_size=4), min_size=4, max_size=4))
def test_lll_preserves_lattice(rows):
    if sympy.Matrix(rows).det() == 0:
        return
    red = il.lll(rows)
    assert il.hnf(red) == il.hnf(rows)
    assert abs(sympy.Matrix(red).det()) == abs(sympy.Matrix(rows).det())
    # the first reduced vector is no longer than any input row
    norm = lambda v: sum(x * x for x in v)
    assert norm(red[0]) <= 2 ** 3 * min(norm(r) for r in rows)


def test_intersection_and_functional_kernel():
    assert il.intersection([(2, 0, 0), (0, 3, 0)], [(1, 1, 0), (0, 0, 1)]) == [(6, 6, 0)]
    assert il.kernel_of_functional([(1, 1, 0, 0), (0, 0, 1, 1)], [1, 1, 1, 1]) == [(1, 1, -1, -1)]
    assert il.kernel_of_functional([(2, 2, 2)], [1, 1, 1]) == []


def test_reduce_mod_is_canonical():
    basis = il.hnf([(1, 1, -1, -1)])
    a = il.reduce_mod((0, 3, 1, 2), basis)
    b = il.reduce_mod((0 + 5, 3 + 5, 1 - 5, 2 - 5), basis)
    assert a == b


def test_lll_finds_short_relation():
    # 3*x0 - 2*x1 = 0 scaled: the reduced basis contains (2, 3, 0)
    rows = [[1, 0, 3 * 2 ** 40], [0, 1, -2 * 2 ** 40]]
    red = il.lll(rows, Fraction(3, 4))
    assert any(abs(r[0]) == 2 and abs(r[1]) == 3 and r[2] == 0 for r in red)
