from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from capform.exactcore import LamPoly, is_prime
from capform.hecke import (
    NewformReducer,
    R_card,
    battery,
    coset_character_sums,
    expected_ramified_eigenvalue,
    f_kj,
    lattice_case,
    ramified_action,
    ramified_eigenvalue_check,
    sample_lambdas,
    shape_case,
    unramified_constant,
    unramified_mu,
    x1_sum,
    x3_sum,
)
from capform.orders import DualVector
from capform.thetacoeff import A_closed_form, FormalCoeffSum
from capform.vvlift import MaassDatum

from conftest import disc

F = Fraction
lam = LamPoly.gen()


def test_f_values():
    assert f_kj(2, 2, 1) == 9
    assert f_kj(2, 3, 1) == 35
    for p in (2, 3, 5):
        for k in range(4):
            assert R_card(p, k, 0) == 1


@pytest.mark.parametrize("args", [(2, -1, 1), (2, 2, 0)])
def test_f_range(args):
    with pytest.raises(ValueError):
        f_kj(*args)


def test_R_range():
    with pytest.raises(ValueError):
        R_card(2, 1, 2)


def test_unramified_examples():
    assert unramified_mu(5).mu1(1) == 155
    mus = unramified_mu(2)
    assert mus.mu1 == 4 * lam * lam + 10
    assert mus.mu2 == 36 * lam * lam - 15
    assert mus.mu2 == 9 * (mus.mu1 - F(35, 3))


@pytest.mark.parametrize("p", [p for p in range(2, 101) if is_prime(p)])
def test_mu1_identity(p):
    assert unramified_mu(p).mu1(2) == 4 * p * p + p**3 + p


def test_unramified_needs_prime():
    with pytest.raises(ValueError):
        unramified_mu(4)


@given(st.integers(-10**6, 10**6).filter(bool), st.sampled_from([2, 3, 5]), st.sampled_from([1, -1]))
def test_reducer_idempotent(m, p, eps):
    r = NewformReducer(p, eps)
    once = r(FormalCoeffSum(1, {m: 1}))
    assert r(once) == once
    assert all(k % p for k in once.terms)


@given(st.integers(-10**5, 10**5).filter(bool), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_reducers_commute(m, e2, e3):
    a, b = NewformReducer(2, e2), NewformReducer(3, e3)
    s = FormalCoeffSum(1, {m: 1, 2 * m: 3})
    assert a(b(s)) == b(a(s))


def _one(D):
    return D.dual.from_quat(D.dual.order.algebra.one())


@pytest.mark.parametrize("eps", [1, -1])
def test_worked_example_n2(eps):
    D = disc(2)
    datum = MaassDatum(2, {2: eps})
    r = NewformReducer(2, eps)
    one = _one(D)
    assert r(ramified_action(one, 2, datum, D)) == FormalCoeffSum(1, {-1: F(39, 2)})
    assert r(A_closed_form(one, datum, D)) == FormalCoeffSum(1, {-1: F(3, 2)})


@pytest.mark.parametrize("N,p", [(2, 2), (3, 3), (5, 5), (30, 2), (30, 5)])
def test_ramified_constant(N, p):
    res = ramified_eigenvalue_check(disc(N), p)
    assert res["constant"] == str(expected_ramified_eigenvalue(p))
    assert res["matches_expected"] and not res["matches_intro_value"]
    assert res["unramified_constant_agrees"]


def test_constants():
    assert [expected_ramified_eigenvalue(p) for p in (2, 3, 5)] == [13, 38, 154]
    assert unramified_constant(2, 2) == 13


def test_battery_n30_has_u2():
    items = battery(disc(30), 2)
    assert {(it.u, it.delta, it.n) for it in items} == {(u, d, n) for u in (0, 1, 2) for d in (0, 1) for n in (1, 7)}
    with pytest.raises(ValueError):
        battery(disc(30), 2, n_values=(3,))


def test_action_errors():
    D = disc(2)
    with pytest.raises(ValueError):
        ramified_action(DualVector((0, 0, 0, 0)), 2, MaassDatum(2), D)
    with pytest.raises(ValueError):
        ramified_action(_one(D), 3, MaassDatum(2), D)


def test_character_sum_examples():
    D = disc(2)
    one = _one(D)
    assert x1_sum(one, 2) == 0
    assert x3_sum(one, 2, D) == 3
    v = D.dual.short_vectors(F(1, 2))[0][0]
    assert x1_sum(v.scale(2), 2) == 16
    D3 = disc(3)
    outside = next(v for v, _ in D3.dual.short_vectors(2) if not D3.dual.in_order(v))
    assert x3_sum(outside, 3, D3) == -1


@pytest.mark.parametrize("N,p", [(2, 2), (3, 3), (5, 5), (30, 3)])
def test_character_sums(N, p):
    res = coset_character_sums(disc(N), p)
    assert res["ok"]
    assert {r["case"] for r in res["rows"]} == {"pO'", "O", "O'"}


@pytest.mark.parametrize("N", [2, 3, 5, 30])
def test_case_descriptions_agree(N):
    D = disc(N)
    from capform.exactcore import prime_factors

    for p in prime_factors(N):
        for v in sample_lambdas(D, p):
            assert lattice_case(v, p, D) == shape_case(v, p, D)


def test_global_order_membership_matches_case_at_prime_level():
    # for prime N the local reading at p is the global one
    for N in (2, 3, 5, 7):
        D = disc(N)
        for v in sample_lambdas(D, N):
            if lattice_case(v, N, D) == "O'":
                assert not D.dual.in_order(v)
            else:
                assert D.dual.in_order(v)
