from __future__ import annotations

import dataclasses

import oracles
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulkit.cdg import build_cdg_dual, element_of_B1
from koszulkit.complexes import WindowError
from koszulkit.corpus import exterior, make_enveloping, symmetric
from koszulkit.linalg import Field
from koszulkit.quadratic import PreconditionError, build_quadratic_slice, quadratic_dual
from koszulkit.twisted import (
    bimodule_resolution,
    change_twisting,
    chevalley_eilenberg,
    conversion_bimodule,
    dual_nonhomog_koszul_module,
    frobenius_check,
    nonhomog_koszul_complex,
    regular_module,
    trivial_comodule,
    twisted_tensor_left,
)

QQ = Field.parse("q")


@pytest.mark.parametrize("name", ["lie2", "weyl1", "abelian2", "sl2"])
def test_two_sided_compatibility(name, two_sided_of):
    D = two_sided_of(name, 3, 3)
    assert D.compat.ok, D.compat.failures


@pytest.mark.parametrize("name", ["lie2", "weyl1"])
@pytest.mark.parametrize("build", [dual_nonhomog_koszul_module, twisted_tensor_left, trivial_comodule],
                         ids=["dual_koszul", "hom_module", "trivial"])
def test_cdg_module_axioms(name, build, two_sided_of):
    rep = build(two_sided_of(name, 3, 3)).check()
    assert rep.ok, rep.failures


def test_regular_module_needs_flat_curvature(two_sided_of):
    assert regular_module(two_sided_of("lie2", 3, 3)).check().ok
    with pytest.raises(PreconditionError):
        regular_module(two_sided_of("weyl1", 3, 3))


def test_negated_twisting_breaks_curvature(two_sided_of):
    D = two_sided_of("lie2", 3, 3)
    bad = dataclasses.replace(D, terms=[(b, c * -1) for b, c in D.terms])
    rep = dual_nonhomog_koszul_module(bad).check()
    assert not rep.results["curvature"]


@pytest.mark.parametrize("name,M", [("lie2", 4), ("weyl1", 4), ("abelian2", 3)])
def test_bimodule_resolution_is_exact(name, M, two_sided_of):
    W = bimodule_resolution(two_sided_of(name, 4, M), M)
    assert W.exact, W.nonzero
    assert not W.complex.square_zero_failures()


def test_resolution_outside_window(two_sided_of):
    with pytest.raises(WindowError):
        bimodule_resolution(two_sided_of("lie2", 3, 2), 3)


@pytest.mark.parametrize("name", ["sl2", "lie2", "abelian2"])
def test_nonhomog_koszul_complex_is_exact(name, two_sided_of):
    W = nonhomog_koszul_complex(two_sided_of(name, 4, 4), 4)
    assert W.exact, W.nonzero


def test_nonhomog_koszul_complex_needs_flat_curvature(two_sided_of):
    with pytest.raises(PreconditionError):
        nonhomog_koszul_complex(two_sided_of("weyl1", 3, 3), 3)


@pytest.mark.parametrize("name,m,frozen", [("sl2", 3, "ce_sl2"), ("lie2", 2, "ce_lie2"),
                                           ("abelian2", 2, "ce_abelian2")])
def test_chevalley_eilenberg_cohomology(name, m, frozen, cdg_of):
    K = chevalley_eilenberg(cdg_of(name, m + 1))
    assert not K.square_zero_failures()
    assert [K.homology_dim(n, 0) for n in range(m + 1)] == oracles.FROZEN[frozen]


def test_chevalley_eilenberg_refuses_curvature(cdg_of):
    with pytest.raises(PreconditionError):
        chevalley_eilenberg(cdg_of("weyl1", 3))


def test_truncated_top_is_not_reported(cdg_of):
    # B^3 of sl2 is nonzero, so the slice through degree 2 cannot certify H^2
    K = chevalley_eilenberg(cdg_of("sl2", 2))
    assert K.homology_dim(1, 0) == 0
    with pytest.raises(WindowError):
        K.homology_dim(2, 0)


small = st.integers(-2, 2)


@settings(max_examples=8)
@given(st.lists(small, min_size=2, max_size=2))
def test_ce_cohomology_of_two_dimensional_lie_algebras(vals):
    br = {(0, 1): list(vals)}
    C = build_cdg_dual(make_enveloping(QQ, 2, br), 3)
    K = chevalley_eilenberg(C)
    assert [K.homology_dim(n, 0) for n in range(3)] == oracles.ce_cohomology(2, br)


@settings(max_examples=5)
@given(vals=st.lists(small, min_size=2, max_size=2))
def test_change_twisting_shifts_the_differential(vals, two_sided_of):
    D = two_sided_of("lie2", 3, 3)
    C = D.B
    a = element_of_B1(C, [[v] for v in vals])
    D2 = change_twisting(D, a)
    assert D2.compat.ok
    rep = dual_nonhomog_koszul_module(D2).check()
    assert rep.ok, rep.failures


# ---------------------------------------------------------------------------
# Frobenius and conversion


def test_exterior_is_frobenius():
    for d in (2, 3):
        S = build_quadratic_slice(quadratic_dual(symmetric(QQ, d)), d + 1)
        assert frobenius_check(S, d).ok
    assert frobenius_check(build_quadratic_slice(exterior(QQ, 3), 4), 3).ok


def test_wrong_top_degree_fails():
    S = build_quadratic_slice(exterior(QQ, 3), 4)
    assert not frobenius_check(S, 2).ok


def test_non_frobenius_negative_control():
    # B^1 = k^2 with all products zero: top component k^2 pairs degenerately with B^0
    Q = quadratic_dual(symmetric(QQ, 2))
    from koszulkit.linalg import Subspace
    from koszulkit.quadratic import QuadraticPresentation
    Z = QuadraticPresentation(Q.R, Q.V, Subspace.full(QQ, 4))
    rep = frobenius_check(build_quadratic_slice(Z, 2), 1)
    assert not rep.ok
    assert rep.first_failure() is not None


def test_truncated_window_for_frobenius():
    S = build_quadratic_slice(quadratic_dual(symmetric(QQ, 2)), 2)
    with pytest.raises(WindowError):
        frobenius_check(S, 2)


@pytest.mark.parametrize("name,opposite", [("lie2", True), ("abelian2", True), ("weyl1", None)])
def test_conversion_bimodule(name, opposite, two_sided_of):
    D = two_sided_of(name, 3, 3, True)
    r = conversion_bimodule(D, 3)
    assert r.ok, (r.left_iso, r.right_iso, r.report.failures)
    assert r.opposite_iso is opposite
    assert all(v > 0 for v in r.E_dims.values())


def test_conversion_needs_opposite_data(two_sided_of):
    with pytest.raises(PreconditionError):
        conversion_bimodule(two_sided_of("lie2", 3, 3), 3)
