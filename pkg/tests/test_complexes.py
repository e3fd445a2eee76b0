from __future__ import annotations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.complexes import CochainComplex, ComplexError, WindowError
from koszulkit.linalg import Field, from_rows, kernel

QQ = Field.parse("q")


def two_term(rows):
    m, n = len(rows), len(rows[0])
    C = CochainComplex(QQ, "two-term")
    C.add(0, 0, n)
    C.add(1, 0, m)
    C.set_differential(0, 0, from_rows(QQ, rows))
    return C


@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=1, max_size=4)))
def test_euler_characteristic(rows):
    C = two_term(rows)
    h0, h1 = C.homology_dim(0, 0), C.homology_dim(1, 0)
    assert h0 - h1 == C.dims[(0, 0)] - C.dims[(1, 0)]
    assert h0 == len(rows[0]) - sympy.Matrix(rows).rank()
    assert C.homology_basis(0, 0).nrows() == h0
    assert C.homology_basis(1, 0).nrows() == h1


@given(st.integers(1, 3).flatmap(lambda n: st.lists(
    st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=1, max_size=3)))
def test_kernel_inclusion_gives_exact_complex(rows):
    # 0 -> ker A -> k^n -> im A -> 0 is exact in the middle
    A = from_rows(QQ, rows)
    K = kernel(A)
    C = CochainComplex(QQ)
    C.add(0, 0, K.dim)
    C.add(1, 0, A.ncols())
    C.add(2, 0, A.nrows())
    C.set_differential(0, 0, K.basis.transpose())
    C.set_differential(1, 0, A)
    C.check_square_zero()
    assert C.homology_dim(0, 0) == 0
    assert C.homology_dim(1, 0) == 0


def test_shape_mismatch_is_an_invariant_violation():
    C = CochainComplex(QQ)
    C.add(0, 0, 2)
    C.add(1, 0, 1)
    with pytest.raises(ComplexError):
        C.set_differential(0, 0, from_rows(QQ, [[1, 0], [0, 1]]))
    with pytest.raises(ComplexError):
        C.set_differential(3, 0, from_rows(QQ, [[1]]))


def test_square_zero_failure():
    C = CochainComplex(QQ)
    for p in range(3):
        C.add(p, 0, 1)
    C.set_differential(0, 0, from_rows(QQ, [[1]]))
    C.set_differential(1, 0, from_rows(QQ, [[1]]))
    assert C.square_zero_failures() == [(0, 0)]
    with pytest.raises(ComplexError):
        C.check_square_zero()


def test_truncated_positions_have_no_verdict():
    C = two_term([[1, 0]])
    C.truncated.add((1, 0))
    assert (1, 0) not in C.homology_table()
    with pytest.raises(WindowError):
        C.homology_dim(1, 0)
    assert C.homology_table() == {(0, 0): 1}
    assert not C.is_exact()
