from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.cdg import (
    build_augmented_dg,
    build_cdg_dual,
    cdg_connection_change,
    element_of_B1,
    identity_morphism,
    quasi_differential_ring,
    verify_cdg_morphism,
    verify_two_morphism,
)
from koszulkit.corpus import corpus, get
from koszulkit.linalg import Field, is_zero, vec
from koszulkit.nonhomog import change_of_generators

QQ = Field.parse("q")
CONSISTENT = [e for e in corpus() if e.nonhomog is not None and not e.failing]


@pytest.mark.parametrize("entry", CONSISTENT, ids=lambda e: e.name)
def test_cdg_axioms_hold(entry, cdg_of):
    C = cdg_of(entry.name, 3)
    rep = C.check_axioms()
    assert rep.ok, rep.failures


@pytest.mark.parametrize("entry", [e for e in CONSISTENT if "augmented" in e.expected], ids=lambda e: e.name)
def test_augmentation_search(entry, cdg_of):
    res = build_augmented_dg(cdg_of(entry.name, 3))
    assert res.found == entry.expected["augmented"]
    if res.found:
        assert is_zero(res.dg.h)
        assert res.dg.check_axioms().ok


def test_weyl_curvature_is_nonzero(cdg_of):
    assert not is_zero(cdg_of("weyl1", 3).h)


def test_fake_jacobi_force_build_has_residual():
    C = build_cdg_dual(get("fake_jacobi").nonhomog, 3, force=True)
    rep = C.check_axioms()
    assert not rep.results["d2_curvature"]


def test_quasi_differential_ring(cdg_of):
    C = cdg_of("weyl1", 3)
    qd = quasi_differential_ring(C, 2)
    b1, c1 = qd.split(1)
    assert (b1, c1) == (C.slice.comps[1].dim, C.R.dim)


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_connection_change_matches_generator_change(vals):
    P = get("lie2").nonhomog
    a = [[v] for v in vals]
    C = build_cdg_dual(P, 3)
    A = element_of_B1(C, a)
    C2 = cdg_connection_change(C, A)
    assert C2.check_axioms().ok
    assert C2.same_as(build_cdg_dual(change_of_generators(P, a), 3))
    assert verify_cdg_morphism(C2, C, identity_morphism(C), A).ok


def test_identity_two_morphism(cdg_of):
    C = cdg_of("lie2", 3)
    zero = element_of_B1(C, [[0], [0]])
    idm = identity_morphism(C)
    assert verify_cdg_morphism(C, C, idm, zero).ok
    two = vec(QQ, [2])
    assert verify_two_morphism(C, C, (idm, zero), (idm, zero), two).ok
    rep = verify_two_morphism(C, C, (idm, zero), (idm, zero), vec(QQ, [0]))
    assert not rep.results["invertible"]
