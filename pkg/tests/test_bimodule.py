from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.bimodule import (
    AlgebraError,
    BaseAlgebra,
    Bimodule,
    direct_sum,
    double_dual_eval,
    is_projective_left,
    left_dual,
    right_dual,
    tensor_dual_iso,
    tensor_over_R,
)
from koszulkit.corpus import get
from koszulkit.linalg import Field, identity

QQ = Field.parse("q")
F2 = Field.parse("fp:2")

BASES = {
    "k": lambda: BaseAlgebra.ground(QQ),
    "kxk": lambda: BaseAlgebra.product(QQ, 2),
    "M2": lambda: BaseAlgebra.matrix_algebra(QQ, 2),
    "dual numbers": lambda: BaseAlgebra.truncated_polynomial(F2, 2),
}


@pytest.mark.parametrize("name", sorted(BASES))
def test_base_algebras_are_associative_and_unital(name):
    R = BASES[name]()
    R.validate()
    Bimodule.regular(R).validate()
    assert R.opposite().opposite() == R


def test_matrix_algebra_is_not_commutative():
    assert not BaseAlgebra.matrix_algebra(QQ, 2).is_commutative()
    assert BaseAlgebra.truncated_polynomial(F2, 2).is_commutative()


@pytest.mark.parametrize("name", sorted(BASES))
@pytest.mark.parametrize("n", [1, 2])
def test_free_module_duals_and_double_dual(name, n):
    R = BASES[name]()
    U = Bimodule.free_left(R, n)
    D = left_dual(U)
    assert D.dim == n * R.dim
    assert right_dual(D).dim == U.dim
    ev = double_dual_eval(U)
    assert ev.is_isomorphism and ev.check()


@pytest.mark.parametrize("name", sorted(BASES))
def test_regular_tensor_regular(name):
    R = BASES[name]()
    T = tensor_over_R(Bimodule.regular(R), Bimodule.regular(R))
    assert T.dim == R.dim
    T.module.validate()


def test_tensor_dual_iso_for_free_modules():
    R = BaseAlgebra.matrix_algebra(QQ, 2)
    U = Bimodule.free_left(R, 1)
    V = Bimodule.free_left(R, 2)
    iso = tensor_dual_iso(U, V)
    assert iso.is_isomorphism and iso.check()


def test_quiver_arrows_compose_only_along_paths():
    V = get("quiver_2cycle").quadratic.V
    assert V.dim == 2
    # a: 0 -> 1 and b: 1 -> 0 compose to ab and ba only
    assert tensor_over_R(V, V).dim == 2
    V.validate()


def test_simple_module_over_dual_numbers_is_not_projective():
    R = BaseAlgebra.truncated_polynomial(F2, 2)
    zero = F2.mat(1, 1)
    one = identity(F2, 1)
    # k = R/(e) with e acting by zero on both sides
    k = Bimodule(R, R, 1, [one, zero], [one, zero], check=True)
    assert not is_projective_left(k)
    assert is_projective_left(Bimodule.regular(R))


def test_inconsistent_actions_are_rejected():
    R = BaseAlgebra.product(QQ, 2)
    I, Z = identity(QQ, 1), QQ.mat(1, 1)
    # both idempotents acting as the identity breaks e0 e1 = 0
    with pytest.raises(AlgebraError):
        Bimodule(R, R, 1, [I, I], [I, Z], check=True)


@given(st.lists(st.sampled_from(["kxk", "M2"]), min_size=1, max_size=3))
def test_direct_sums_of_regular_modules(parts):
    R = BASES[parts[0]]()
    mods = [Bimodule.regular(R)] * len(parts)
    S = direct_sum(mods)
    S.validate()
    assert S.dim == len(parts) * R.dim
    assert left_dual(S).dim == S.dim
    assert is_projective_left(S)
    assert double_dual_eval(S).is_isomorphism
