from __future__ import annotations

import oracles
import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.bimodule import AlgebraError
from koszulkit.cdg import build_cdg_dual
from koszulkit.corpus import corpus, get, make_enveloping
from koszulkit.linalg import Field
from koszulkit.nonhomog import (
    ConsistencyError,
    change_of_generators,
    same_data,
    triple_relations,
    verify_self_consistency,
)

QQ = Field.parse("q")
NONHOMOG = [e for e in corpus() if e.nonhomog is not None]


@pytest.mark.parametrize("entry", NONHOMOG, ids=lambda e: e.name)
def test_self_consistency_matches_expectation(entry):
    rep = verify_self_consistency(entry.nonhomog)
    assert rep.ok == (not entry.failing)
    if "first_failure" in entry.expected:
        assert rep.first_failure() == entry.expected["first_failure"]


def test_fake_jacobi_witness_is_explicit():
    rep = verify_self_consistency(get("fake_jacobi").nonhomog)
    w = rep.witnesses["j"]
    assert w["lhs"] != w["rhs"]
    assert any(x != 0 for x in w["j"])
    # the rewriting oracle sees the same defect as a non-confluent overlap
    assert not oracles.enveloping_rewriting(3, oracles.FAKE_JACOBI).confluent()
    assert not oracles.ce_square_zero(3, oracles.FAKE_JACOBI)


def test_inconsistent_data_refuses_to_build():
    with pytest.raises(ConsistencyError) as info:
        build_cdg_dual(get("fake_jacobi").nonhomog, 3)
    assert info.value.report.first_failure() == "j"


def test_triple_relations_of_sl2():
    # I^(3) of Sym(k^3) is Lambda^3, one-dimensional
    assert len(triple_relations(get("sl2").nonhomog)) == 1


coeffs = st.integers(-3, 3)


@given(st.lists(coeffs, min_size=2, max_size=2))
def test_change_of_generators_is_invertible(vals):
    P = get("lie2").nonhomog
    a = [[v] for v in vals]
    P2 = change_of_generators(P, a)
    assert verify_self_consistency(P2).ok
    back = change_of_generators(P2, [[-v] for v in vals])
    assert same_data(back, P)


@given(st.lists(coeffs, min_size=3, max_size=3))
def test_random_brackets_consistent_iff_jacobi(vals):
    # [x,y] = a z, [y,z] = b x, [z,x] = c y is always a Lie algebra
    br = {(0, 1): [0, 0, vals[0]], (1, 2): [vals[1], 0, 0], (0, 2): [0, -vals[2], 0]}
    P = make_enveloping(QQ, 3, br, check=False)
    assert verify_self_consistency(P).ok == oracles.ce_square_zero(3, br)


@given(st.lists(coeffs, min_size=6, max_size=6))
def test_general_brackets_consistent_iff_jacobi(vals):
    br = {(0, 1): [vals[0], 0, vals[1]], (1, 2): [vals[2], vals[3], 0], (0, 2): [0, vals[4], vals[5]]}
    P = make_enveloping(QQ, 3, br, check=False)
    assert verify_self_consistency(P).ok == oracles.ce_square_zero(3, br)


def test_weyl_generators_change_needs_linear_map():
    P = get("weyl1").nonhomog
    with pytest.raises((AlgebraError, ValueError)):
        change_of_generators(P, [[1, 2]])
