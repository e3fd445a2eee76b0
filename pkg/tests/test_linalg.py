from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.linalg import (
    DimensionError,
    Field,
    Quotient,
    Subspace,
    from_rows,
    identity,
    image,
    is_triple_distributive,
    kernel,
    kron,
    rank,
    rows_of,
    solve,
    to_int_or_frac,
)

QQ = Field.parse("q")
F5 = Field.parse("fp:5")


def matrices(max_rows=5, max_cols=5, lo=-3, hi=3):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m)))


def _rank_mod(rows, p):
    A = [[x % p for x in r] for r in rows]
    r = 0
    for c in range(len(A[0]) if A else 0):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return r


@given(matrices())
def test_rank_matches_sympy_over_q(rows):
    assert rank(from_rows(QQ, rows)) == sympy.Matrix(rows).rank()


@given(matrices(lo=0, hi=4))
def test_rank_matches_naive_elimination_mod_5(rows):
    assert rank(from_rows(F5, rows)) == _rank_mod(rows, 5)


@given(matrices())
def test_rank_nullity(rows):
    M = from_rows(QQ, rows)
    assert rank(M) + kernel(M).dim == M.ncols()
    K = kernel(M)
    if K.dim:
        assert all(x == 0 for x in (M * K.basis.transpose()).entries())


@given(matrices(), matrices())
def test_grassmann_formula(a, b):
    n = min(len(a[0]), len(b[0]))
    X = Subspace.span(QQ, n, [r[:n] for r in a])
    Y = Subspace.span(QQ, n, [r[:n] for r in b])
    assert (X + Y).dim + (X & Y).dim == X.dim + Y.dim
    assert (X & Y).contains(Subspace.zero(QQ, n))
    assert (X + Y).contains(X) and X.contains(X & Y)


@given(matrices(), matrices(), matrices())
def test_triple_distributivity_holds_with_comparable_pair(a, b, c):
    n = min(len(a[0]), len(b[0]), len(c[0]))
    X = Subspace.span(QQ, n, [r[:n] for r in a])
    Z = Subspace.span(QQ, n, [r[:n] for r in c])
    # X inside X + Y makes the triple (X, X + Y, Z) distributive by modularity
    Y = X + Subspace.span(QQ, n, [r[:n] for r in b])
    assert is_triple_distributive(X, Z, Y)


def test_three_lines_in_a_plane_are_not_distributive():
    X = Subspace.span(QQ, 2, [[1, 0]])
    Y = Subspace.span(QQ, 2, [[0, 1]])
    Z = Subspace.span(QQ, 2, [[1, 1]])
    assert not is_triple_distributive(X, Y, Z)


@given(matrices(), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solve_consistent_systems(rows, x):
    A = from_rows(QQ, rows)
    xs = from_rows(QQ, [[v] for v in x[: A.ncols()]])
    b = A * xs
    sol = solve(A, b)
    assert sol is not None and A * sol == b


def test_solve_inconsistent_returns_none():
    A = from_rows(QQ, [[1, 0], [1, 0]])
    b = from_rows(QQ, [[1], [2]])
    assert solve(A, b) is None


@given(matrices())
def test_quotient_projection_kills_subspace(rows):
    n = len(rows[0])
    S = Subspace.span(QQ, n, rows)
    Q = Quotient(S)
    assert Q.dim == n - S.dim
    assert Q.proj * Q.lift == identity(QQ, Q.dim)
    if S.dim:
        assert all(x == 0 for x in (Q.proj * S.basis.transpose()).entries())


def square(n):
    return st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n)


@given(square(3), square(3), square(2), square(2))
def test_kron_mixed_product(a, c, b, d):
    A, C, B, D = (from_rows(QQ, x) for x in (a, c, b, d))
    assert kron(QQ, A, B) * kron(QQ, C, D) == kron(QQ, A * C, B * D)


def test_image_and_coordinates():
    M = from_rows(QQ, [[1, 2], [2, 4], [0, 1]])
    I = image(M)
    assert I.dim == 2
    assert rows_of(I.coordinates(from_rows(QQ, [[1, 2, 0]])))


def test_field_parsing_and_errors():
    assert Field.parse("fp:7").characteristic == 7
    assert to_int_or_frac(QQ("3/4")) == Fraction(3, 4)
    assert to_int_or_frac(F5(7)) == 2
    with pytest.raises(ValueError):
        Field.parse("fp:6")
    with pytest.raises(ValueError):
        F5.parse_scalar("1/5")
    with pytest.raises(DimensionError):
        solve(from_rows(QQ, [[1, 0]]), from_rows(QQ, [[1], [2]]))
