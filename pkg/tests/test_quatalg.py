from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from capform.exactcore import prime_factors
from capform.quatalg import QuatAlg, hilbert_symbol, parse_elt, ramified_primes, trace_norm

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_ints = st.integers(-60, 60).filter(lambda x: x != 0)


def brute_hilbert(a: int, b: int, p: int) -> int:
    """Primitive solution of z^2 = a x^2 + b y^2 modulo p^3 (odd p) or 2^6.

    Sound for squarefree a, b by Hensel's lemma.
    """
    m = p**3 if p != 2 else 2**6
    squares, unit_squares = set(), set()
    for z in range(m):
        squares.add(z * z % m)
        if z % p:
            unit_squares.add(z * z % m)
    for x in range(m):
        for y in range(m):
            t = (a * x * x + b * y * y) % m
            if (x % p or y % p) and t in squares:
                return 1
            if t in unit_squares:
                return 1
    return -1


def squarefree(n: int) -> bool:
    return all(n % (p * p) for p in prime_factors(abs(n)))


@pytest.fixture
def B():
    return QuatAlg(-1, -3)


def test_relations(B):
    i, j, k = B.basis()[1:]
    assert i * j == k and j * i == -k
    assert j * k == B.elt(0, 3)
    assert k * k == B.elt(-3)
    q = B.elt(1, 2, 3, 4)
    assert q * B.one() == q


def test_trace_norm_examples():
    assert trace_norm(QuatAlg(-1, -1).one()) == (2, 1)
    assert trace_norm(QuatAlg(-1, -1).elt(*[Fraction(1, 2)] * 4)) == (1, 1)
    assert trace_norm(QuatAlg(-1, -3).elt(Fraction(1, 2), 0, 0, Fraction(1, 2))) == (1, 1)


@pytest.mark.parametrize("a,b,ram", [(-1, -1, [2]), (-1, -3, [3]), (-2, -5, [5]), (-3, -10, [2, 3, 5])])
def test_discriminants(a, b, ram):
    B = QuatAlg(a, b)
    assert list(B.ramified_finite) == ram
    assert len(ram) % 2 == 1


def test_indefinite_rejected():
    with pytest.raises(ValueError):
        QuatAlg(1, -1)


def test_mismatched_algebras():
    with pytest.raises(ValueError):
        QuatAlg(-1, -1).one() * QuatAlg(-1, -3).one()
    with pytest.raises(ValueError):
        parse_elt(QuatAlg(-1, -1), ["1", "2"])


@given(st.lists(fracs, min_size=8, max_size=8), st.sampled_from([(-1, -1), (-1, -3), (-3, -10)]))
def test_norm_multiplicative_and_involution(cs, ab):
    B = QuatAlg(*ab)
    q1, q2 = B.elt(*cs[:4]), B.elt(*cs[4:])
    assert (q1 * q2).nrd() == q1.nrd() * q2.nrd()
    assert q1.conjugate().conjugate() == q1
    assert (q1 * q2).conjugate() == q2.conjugate() * q1.conjugate()
    assert (q1.nrd() == 0) == q1.is_zero()
    # tr(q1 conj(q2)) is symmetric
    assert (q1 * q2.conjugate()).trace() == (q2 * q1.conjugate()).trace()


@given(nonzero_ints, nonzero_ints)
def test_hilbert_reciprocity(a, b):
    places = set(prime_factors(abs(a)) + prime_factors(abs(b)) + [2])
    prod = hilbert_symbol(a, b, "inf")
    for p in places:
        prod *= hilbert_symbol(a, b, p)
    assert prod == 1


@given(nonzero_ints, fracs.filter(lambda x: x != 0), st.sampled_from([2, 3, 5, 7]))
def test_hilbert_trivial_on_squares(b, c, p):
    assert hilbert_symbol(c * c, b, p) == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_hilbert_against_brute_force(p):
    vals = [n for n in range(-15, 16) if n and squarefree(n)]
    for a in vals:
        for b in vals:
            assert hilbert_symbol(a, b, p) == brute_hilbert(a, b, p), (a, b, p)


def test_ramified_primes_examples():
    assert ramified_primes(-1, -1) == [2]
    assert hilbert_symbol(-1, -3, 3) == -1 and hilbert_symbol(-1, -3, 2) == 1
