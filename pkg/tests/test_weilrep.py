import random
from math import gcd
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capform.exactcore import CycNum, euler_phi, xgcd
from capform.weilrep import (
    CycMatrix,
    SplitWeil,
    check_sl2,
    full_module,
    gamma0_check,
    gamma0_closed_form,
    in_gamma0,
    random_gamma0,
    relation_report,
    rho,
    rho_apply,
    rho_S,
    rho_T,
    word_decompose,
)

from conftest import disc


def _mul(A, B):
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


@st.composite
def sl2(draw, bound=60):
    c = draw(st.integers(-bound, bound))
    d = draw(st.integers(-bound, bound))
    g = gcd(c, d)
    c, d = (c // g, d // g) if g else (0, 1)
    _, s, t = xgcd(d, c)  # s d + t c = 1
    k = draw(st.integers(-3, 3))
    return ((s + k * c, -t + k * d), (c, d))


def test_n2_generators():
    D = disc(2)
    T = rho_T(D)
    assert [T.entry(i, i) for i in range(4)] == [1, -1, -1, -1]
    S = rho_S(D)
    for i in range(4):
        for j in range(4):
            assert S.entry(i, j) in (Fraction(1, 2), Fraction(-1, 2))
    assert S @ S == CycMatrix.identity(4, 2)


@pytest.mark.parametrize("N", [2, 3, 5, 7])
def test_s_column_of_e0(N):
    S = rho_S(disc(N))
    col = S.column(0)
    assert all(col.entry(i, 0) == Fraction(-1, N) for i in range(N * N))


@pytest.mark.parametrize("N", [2, 3, 5, 7])
def test_relations(N):
    assert all(relation_report(disc(N)).values())


def test_word_examples():
    assert str(word_decompose(((1, 5), (0, 1)))) == "T^5"
    assert str(word_decompose(((0, -1), (1, 0)))) == "S"
    assert word_decompose(((1, 0), (2, 1))).evaluate() == ((1, 0), (2, 1))


@given(sl2(bound=10**6))
def test_word_evaluates_and_is_short(M):
    w = word_decompose(M)
    assert w.evaluate() == M
    assert len(w.tokens) <= 4 * (max(abs(x) for row in M for x in row).bit_length() + 2)


@pytest.mark.parametrize("M", [((1, 1), (1, 1)), ((2, 0), (0, 1)), ((1, 0.5), (0, 1)), ((1,),)])
def test_bad_matrices(M):
    with pytest.raises(ValueError):
        check_sl2(M)


@given(sl2(bound=30), sl2(bound=30))
def test_representation_property_n3(M1, M2):
    D = disc(3)
    assert rho(_mul(M1, M2), D) == rho(M1, D) @ rho(M2, D)


@given(sl2(bound=40))
def test_rho_apply_matches_full_matrix(M):
    D = disc(5)
    mod = full_module(D)
    v = CycMatrix.basis_vector(mod.size, 7, mod.level)
    assert rho_apply(M, mod, v) == rho(M, mod) @ v


@pytest.mark.parametrize("N", [2, 3, 5, 7])
def test_gamma0_closed_form_and_invariance_of_e0(N):
    D = disc(N)
    rng = random.Random(N)
    mod = full_module(D)
    e0 = CycMatrix.basis_vector(mod.size, 0, mod.level)
    for _ in range(5):
        M = random_gamma0(N, rng)
        assert in_gamma0(M, N)
        assert max(abs(x) for row in M for x in row) <= 10**4
        R = rho(M, D)
        assert R == gamma0_closed_form(M, D)
        assert R @ e0 == e0


def test_closed_form_rejects_non_gamma0():
    with pytest.raises(ValueError):
        gamma0_closed_form(((1, 0), (1, 1)), disc(2))


def test_level_30_split():
    D = disc(30)
    split = SplitWeil(D)
    assert all(split.verify_generators().values())
    rng = random.Random(1)
    for _ in range(5):
        assert gamma0_check(random_gamma0(30, rng), D, split)


def _random_cyc_matrix(rng, n, m, M, big=False):
    d = euler_phi(M)
    hi = 2**40 if big else 5
    data = np.array([[[rng.randint(-hi, hi) for _ in range(d)] for _ in range(m)] for _ in range(n)], dtype=np.int64)
    return CycMatrix(M, data, rng.randint(1, 6))


@pytest.mark.parametrize("M,big", [(3, False), (5, False), (12, False), (30, False), (7, True)])
def test_matmul_against_entrywise_cycnum(M, big):
    rng = random.Random(M)
    A = _random_cyc_matrix(rng, 3, 4, M, big)
    B = _random_cyc_matrix(rng, 4, 2, M, big)
    C = A @ B
    for i in range(3):
        for j in range(2):
            expected = sum((A.entry(i, k) * B.entry(k, j) for k in range(4)), CycNum.rational(0))
            assert C.entry(i, j) == expected


def test_conjugate_transpose_entrywise():
    rng = random.Random(0)
    A = _random_cyc_matrix(rng, 3, 3, 5)
    At = A.conjugate_transpose()
    assert all(At.entry(j, i) == A.entry(i, j).conjugate() for i in range(3) for j in range(3))
