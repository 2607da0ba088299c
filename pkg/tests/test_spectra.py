from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from capform.exactcore import LamPoly
from capform.spectra import (
    LFactorPoly,
    M,
    SatakeMonomial,
    cap_consistency,
    cap_parameters,
    chebyshev_T,
    exterior_square,
    is_self_dual,
    local_factor_ramified,
    local_factor_unramified,
    nontempered_witness,
    ramified_chi,
    satake_lift,
    std_identity_check,
    sym2_unramified,
    torus_gl2xgl2_to_gso22,
    weyl_equivalent,
    zeta_factor,
)

F = Fraction
PRIMES = [2, 3, 5, 7, 11]


def _expand(values):
    """prod (1 - v X) with rational v, as a coefficient list."""
    poly = [F(1)]
    for v in values:
        poly = [a - v * b for a, b in zip(poly + [F(0)], [F(0)] + poly)]
    return poly


def _value(m: SatakeMonomial, p, alpha):
    return F(p) ** int(m.pexp) * F(alpha) ** m.aexp


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("alpha", [2, F(1, 3), 5, -2])
def test_factor_against_rational_alpha(p, alpha):
    lam_val = F(alpha) + 1 / F(alpha)
    for ramified in (False, True):
        poly = LFactorPoly.from_monomials(p, satake_lift(p, ramified))
        expected = _expand([_value(m, p, alpha) for m in satake_lift(p, ramified)])
        assert poly.at(lam_val) == expected


@pytest.mark.parametrize("p", PRIMES)
def test_std_identities(p):
    for ramified in (False, True):
        res = std_identity_check(p, ramified)
        assert res["ok"], res["checks"]


@pytest.mark.parametrize("p", PRIMES)
def test_cap(p):
    res = cap_consistency(p)
    assert res["so33_matches_lift"] and res["gso22_expected"]


def test_lift_examples():
    assert sorted(satake_lift(2)) == sorted([M(0, 2), M(1), M(0), M(0), M(-1), M(0, -2)])
    ram = satake_lift(3, ramified=True)
    assert sorted(ram) == sorted([M(1), M(0), M(-1), M(-1)])
    assert not is_self_dual(ram)
    assert is_self_dual(satake_lift(3))
    assert nontempered_witness(satake_lift(3))
    assert ramified_chi(5) == [M(1), M(-1)]


def test_ramified_factor_shape():
    p = 3
    got = local_factor_ramified(p)
    # no dependence on lambda at a ramified prime
    assert got.at(0) == got.at(7) == _expand([F(3), F(1), F(1, 3), F(1, 3)])


def test_unramified_palindromic():
    for p in PRIMES:
        assert local_factor_unramified(p).is_palindromic()
        assert local_factor_unramified(p).degree == 6


def test_sym2_times_zetas():
    p = 2
    prod = sym2_unramified(p) * zeta_factor(p, -1) * zeta_factor(p, 0) * zeta_factor(p, 1)
    assert prod == local_factor_unramified(p)


def test_exterior_square_count():
    assert len(exterior_square(cap_parameters(2))) == 6
    assert weyl_equivalent(exterior_square(cap_parameters(2)), satake_lift(2))


def test_gso22_values():
    got = torus_gl2xgl2_to_gso22(cap_parameters(7))
    assert sorted(got) == sorted([M(1), M(1, 2), M(1, -2), M(1)])


@given(st.integers(0, 12))
def test_chebyshev(k):
    # T_k(2 cos t) = 2 cos(k t); check at alpha = 2: 2^k + 2^-k
    assert chebyshev_T(k)(F(5, 2)) == F(2) ** k + F(2) ** -k


monos = st.builds(SatakeMonomial, st.fractions(max_denominator=2, min_value=-3, max_value=3), st.integers(-4, 4))


@given(monos, monos)
def test_monomial_group(a, b):
    assert (a * b) / b == a
    assert a * a.inverse() == M(0)
    assert a.canonical() == a.inverse().canonical()


def test_errors():
    with pytest.raises(ValueError):
        satake_lift(4)
    with pytest.raises(ValueError):
        LFactorPoly.from_monomials(2, [M(F(1, 2))])
    with pytest.raises(ValueError):
        LFactorPoly.from_monomials(2, [M(0, 1)])
    with pytest.raises(ValueError):
        LFactorPoly(2, (LamPoly.const(2),))
    with pytest.raises(ValueError):
        torus_gl2xgl2_to_gso22([M(0)] * 3)
