from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.corpus import corpus, exterior, random_presentation, symmetric
from koszulkit.koszul import (
    dual_koszul_complex,
    first_koszul_complex,
    koszul_complex_exact,
    koszul_pair,
    second_koszul_complex,
)
from koszulkit.linalg import Field
from koszulkit.quadratic import PreconditionError, check_koszul_tor

QQ = Field.parse("q")
F5 = Field.parse("fp:5")
WITH_VERDICT = [e for e in corpus() if "koszul" in e.expected]


@pytest.mark.parametrize("entry", WITH_VERDICT, ids=lambda e: e.name)
def test_koszul_complexes_exact_iff_koszul(entry):
    kp = koszul_pair(entry.quadratic, 4)
    first = koszul_complex_exact(first_koszul_complex(kp), 4)
    second = koszul_complex_exact(second_koszul_complex(kp), 4)
    want = entry.expected["koszul"]
    assert all(first.values()) == want
    assert all(second.values()) == want


def test_canonical_element_has_rank_dim_v():
    kp = koszul_pair(symmetric(QQ, 3), 3)
    assert len(kp.gen_terms()) == 3
    assert kp.E.nrows() == kp.B.comps[1].dim and kp.E.ncols() == kp.A.comps[1].dim


def test_dual_complex_squares_to_zero():
    kp = koszul_pair(exterior(QQ, 2), 3)
    C = dual_koszul_complex(kp)
    assert not C.square_zero_failures()


def test_degree_zero_homology_is_the_base():
    kp = koszul_pair(symmetric(QQ, 2), 3)
    C = first_koszul_complex(kp)
    assert C.is_exact(1) and C.is_exact(2)
    assert sum(C.homology_dim(p, 0) for p in C.positions(0)) == 1


def test_wrong_partner_is_rejected():
    with pytest.raises(PreconditionError):
        koszul_pair(symmetric(QQ, 2), 3, B=symmetric(QQ, 2))


@given(st.integers(0, 10 ** 6))
def test_random_complexes_follow_tor_verdict(seed):
    Q = random_presentation(F5, random.Random(seed))
    kp = koszul_pair(Q, 3)
    verdict = check_koszul_tor(Q, 3).ok
    C1 = first_koszul_complex(kp)
    assert not C1.square_zero_failures()
    assert all(koszul_complex_exact(C1, 3).values()) == verdict
