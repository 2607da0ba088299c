import cmath
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.functions.combinatorial.numbers import kronecker_symbol
from sympy.matrices.normalforms import invariant_factors

from capform.exactcore import (
    CycNum,
    LamPoly,
    cyclotomic_polynomial,
    det,
    divisors,
    e,
    factorint,
    fmt_rat,
    inverse,
    is_prime,
    jacobi,
    kronecker,
    mat_mul,
    rat,
    root_of_unity,
    snf,
    valuation,
    xgcd,
)

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=30)
small_mats = st.lists(st.lists(st.integers(-20, 20), min_size=4, max_size=4), min_size=4, max_size=4)


def test_rat_parses_strings_and_rejects_floats():
    assert rat("3/6") == Fraction(1, 2)
    assert rat(-4) == -4
    with pytest.raises(TypeError):
        rat(0.5)


def test_fmt_rat_omits_unit_denominator():
    assert fmt_rat(Fraction(4, 2)) == "2"
    assert fmt_rat(Fraction(-1, 3)) == "-1/3"


@given(st.integers(1, 10**6))
def test_factorint_matches_sympy(n):
    assert factorint(n) == sympy.factorint(n)


@given(st.integers(1, 5000))
def test_divisors_and_primality(n):
    assert divisors(n) == sympy.divisors(n)
    assert is_prime(n) == sympy.isprime(n)


def test_valuation_of_rationals():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(3, 20), 2) == -2


@given(st.integers(-200, 200), st.integers(1, 400))
def test_kronecker_matches_sympy(a, n):
    assert kronecker(a, n) == kronecker_symbol(a, n)
    if n % 2:
        assert jacobi(a, n) == sympy.jacobi_symbol(a, n)


@given(st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_xgcd_bezout(a, b):
    g, x, y = xgcd(a, b)
    assert g == sympy.gcd(a, b) and a * x + b * y == g


@given(small_mats)
def test_snf_is_a_valid_decomposition_and_matches_sympy(A):
    U, Dm, V = snf(A)
    assert mat_mul(mat_mul(U, A), V) == Dm
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [Dm[i][i] for i in range(4)]
    assert all(Dm[i][j] == 0 for i in range(4) for j in range(4) if i != j)
    nonzero = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    expected = [abs(int(x)) for x in invariant_factors(sympy.Matrix(A), domain=sympy.ZZ)]
    assert nonzero == [x for x in expected if x]


@given(small_mats)
def test_inverse_of_nonsingular(A):
    if det(A) == 0:
        return
    Ai = inverse(A)
    assert mat_mul(A, Ai) == [[int(i == j) for j in range(4)] for i in range(4)]


@pytest.mark.parametrize("M", [1, 2, 3, 4, 5, 6, 8, 12, 30, 60])
def test_cyclotomic_polynomial_matches_sympy(M):
    x = sympy.symbols("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(M, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(M)) == [int(c) for c in expected]


@pytest.mark.parametrize("M", [3, 4, 5, 8, 12, 30])
def test_roots_of_unity_sum_to_zero_and_have_order_M(M):
    z = root_of_unity(1, M)
    assert z**M == 1
    assert sum((z**k for k in range(M)), CycNum.rational(0)) == 0
    assert all(z**k != 1 for k in range(1, M))


def test_e_is_periodic_and_level_two_is_rational():
    assert e(Fraction(1, 2)) == -1
    assert e(Fraction(7, 3)) == e(Fraction(1, 3))
    assert e(Fraction(1, 2)).level == 1


cyc_elems = st.builds(
    lambda M, cs: CycNum(M, cs),
    st.sampled_from([3, 4, 5, 12]),
    st.lists(fracs, min_size=12, max_size=12),
)


@given(cyc_elems, cyc_elems, cyc_elems)
def test_cyclotomic_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a - a == 0


@given(cyc_elems)
def test_complex_embedding_is_a_ring_map(a):
    b = a * a.conjugate()
    assert abs(complex(b) - abs(complex(a)) ** 2) < 1e-6 * (1 + abs(complex(a)) ** 2)
    assert abs(complex(a.conjugate()) - complex(a).conjugate()) < 1e-9 * (1 + abs(complex(a)))


@given(st.integers(-100, 100), st.integers(1, 40))
def test_root_of_unity_embedding(k, M):
    assert abs(complex(root_of_unity(k, M)) - cmath.exp(2j * cmath.pi * k / M)) < 1e-12


@given(cyc_elems)
def test_cycnum_json_round_trip(a):
    assert CycNum.from_json(a.to_json()) == a


lam_polys = st.builds(LamPoly, st.dictionaries(st.integers(0, 5), fracs, max_size=4))


@given(lam_polys, lam_polys, fracs)
def test_lampoly_evaluation_is_a_homomorphism(p, q, x):
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert LamPoly.from_json(p.to_json()) == p
