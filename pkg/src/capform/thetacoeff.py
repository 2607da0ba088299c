"""Fourier coefficients A(beta) of the theta lift as formal sums of c(m).

A(beta) = sqrt(Q(beta)) * sum_m a_m c(m) is held as a ``FormalCoeffSum``
(norm = Q(beta), terms = {m: a_m}); the square root is never taken. Two
independent evaluations are provided: the divisor sum over d | content(beta)
of c_{mu_{beta/d}}(beta/d), and the closed multi-index formula in terms of
the primitive decomposition of beta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Mapping

from .discform import DiscElt, DiscGroup
from .exactcore import divisors, fmt_rat, prime_factors, rat
from .orders import DualVector, primitive_decomposition
from .vvlift import LevelMismatch, MaassDatum


class IntegralityError(ArithmeticError):
    pass


class IntegralityWarning(UserWarning):
    def __init__(self, argument: Fraction, where: str):
        super().__init__(f"non-integral coefficient argument {fmt_rat(argument)} in {where}; contributes 0")
        self.argument = argument
        self.where = where


def _diagnose(argument: Fraction, where: str, strict: bool):
    if strict:
        raise IntegralityError(f"coefficient argument {fmt_rat(argument)} in {where} is not a nonzero integer")
    warnings.warn(IntegralityWarning(argument, where), stacklevel=3)


def _rat_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    return Fraction(a, b) if a * a == x.numerator and b * b == x.denominator else None


@dataclass
class FormalCoeffSum:
    """sqrt(norm) * sum_m terms[m] c(m)."""

    norm: Fraction
    terms: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.norm = rat(self.norm)
        if self.norm <= 0:
            raise ValueError("norm must be positive")
        self.terms = {int(m): Fraction(a) for m, a in self.terms.items() if a}

    @classmethod
    def zero(cls, norm=1) -> "FormalCoeffSum":
        return cls(rat(norm), {})

    def is_zero(self) -> bool:
        return not self.terms

    def rescale(self, norm) -> "FormalCoeffSum":
        """Same value written over sqrt(norm); needs norm/self.norm to be a rational square."""
        norm = rat(norm)
        s = _rat_sqrt(self.norm / norm)
        if s is None:
            raise ValueError(f"cannot rescale norm {self.norm} to {norm}: ratio is not a square")
        return FormalCoeffSum(norm, {m: a * s for m, a in self.terms.items()})

    def __add__(self, other: "FormalCoeffSum") -> "FormalCoeffSum":
        other = other.rescale(self.norm) if other.norm != self.norm else other
        out = dict(self.terms)
        for m, a in other.terms.items():
            out[m] = out.get(m, 0) + a
        return FormalCoeffSum(self.norm, out)

    def __neg__(self) -> "FormalCoeffSum":
        return FormalCoeffSum(self.norm, {m: -a for m, a in self.terms.items()})

    def __sub__(self, other: "FormalCoeffSum") -> "FormalCoeffSum":
        return self + (-other)

    def scale(self, k) -> "FormalCoeffSum":
        k = rat(k)
        return FormalCoeffSum(self.norm, {m: k * a for m, a in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalCoeffSum):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        try:
            other = other.rescale(self.norm)
        except ValueError:
            return False
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def ratio_to(self, other: "FormalCoeffSum") -> Fraction | None:
        """k with self = k * other, or None if not proportional (other nonzero)."""
        if other.is_zero():
            raise ZeroDivisionError("ratio to a zero sum")
        o = other.rescale(self.norm)
        if set(o.terms) != set(self.terms):
            return None
        m0 = next(iter(o.terms))
        k = self.terms[m0] / o.terms[m0]
        return k if all(self.terms[m] == k * o.terms[m] for m in o.terms) else None

    def evaluate(self, coeffs: Mapping[int, complex]) -> complex:
        """Numeric value sqrt(norm) * sum a_m c(m)."""
        total = 0.0
        for m, a in self.terms.items():
            if m not in coeffs:
                raise KeyError(m)
            total += float(a) * coeffs[m]
        return float(self.norm) ** 0.5 * total

    def to_json(self) -> dict:
        items = sorted(self.terms.items(), key=lambda t: (-t[0]))
        return {"norm": fmt_rat(self.norm), "terms": {str(m): fmt_rat(a) for m, a in items}}

    @classmethod
    def from_json(cls, obj) -> "FormalCoeffSum":
        return cls(rat(obj["norm"]), {int(m): rat(a) for m, a in obj["terms"].items()})

    def __repr__(self):
        return f"FormalCoeffSum({self.to_json()})"


def _check_level(datum: MaassDatum, D: DiscGroup):
    if datum.level != D.level:
        raise LevelMismatch(f"datum level {datum.level} differs from level {D.level} of D")


@lru_cache(maxsize=None)
def _c_mu_terms(Q: Fraction, q: int, N: int, signs: tuple, strict: bool) -> tuple:
    eps = dict(signs)
    out: dict[int, Fraction] = {}
    for c in divisors(N // q):
        M = N // c
        coeff = 1
        for p in prime_factors(M):
            coeff *= -eps[p]
        arg = -Q * M
        if arg.denominator != 1 or arg == 0:
            _diagnose(arg, "c_mu", strict)
            continue
        m = int(arg)
        out[m] = out.get(m, 0) + coeff
    return tuple(sorted((m, a) for m, a in out.items() if a))


def c_mu(lam: DualVector, mu: DiscElt, datum: MaassDatum, strict: bool = False) -> FormalCoeffSum:
    """c_mu(lambda) as a pure combination of c(m) (norm 1)."""
    D = mu.group
    _check_level(datum, D)
    if D.class_of(lam) != mu:
        return FormalCoeffSum.zero()
    Q = D.dual.nrd(lam)
    return FormalCoeffSum(1, dict(_c_mu_terms(Q, D.q_mu(mu), datum.level, datum.sign_key(), strict)))


def A_divisor_form(beta: DualVector, datum: MaassDatum, D: DiscGroup, strict: bool = False) -> FormalCoeffSum:
    """sqrt(Q(beta)) sum_{d | content} c_{mu_{beta/d}}(beta/d)."""
    if beta.is_zero():
        raise ValueError("A(0) is not defined: the expansion has no beta = 0 term")
    _check_level(datum, D)
    Q = D.dual.nrd(beta)
    total: dict[int, Fraction] = {}
    for d in divisors(beta.content()):
        lam = beta.divide(d)
        part = c_mu(lam, D.class_of(lam), datum, strict)
        for m, a in part.terms.items():
            total[m] = total.get(m, 0) + a
    return FormalCoeffSum(Q, total)


@dataclass(frozen=True)
class BetaShape:
    """The data A(beta) depends on: Q(beta), (u_p), (delta_p), n."""

    Q: Fraction
    u: tuple
    delta: tuple
    n: int


def beta_shape(beta: DualVector, D: DiscGroup) -> BetaShape:
    if beta.is_zero():
        raise ValueError("zero vector has no shape")
    pd = primitive_decomposition(beta, D.N)
    q0 = D.dual.nrd(pd.beta0).denominator  # = q of the class of beta0
    primes = prime_factors(D.N)
    return BetaShape(
        D.dual.nrd(beta),
        tuple(pd.u[p] for p in primes),
        tuple(0 if q0 % p == 0 else 1 for p in primes),
        pd.n,
    )


@lru_cache(maxsize=None)
def _closed_terms(shape: BetaShape, N: int, signs: tuple, strict: bool) -> tuple:
    primes = prime_factors(N)
    eps = dict(signs)
    out: dict[int, Fraction] = {}
    ranges = [range(2 * u + dl + 1) for u, dl in zip(shape.u, shape.delta)]
    for ts in product(*ranges):
        denom = Fraction(1)
        sign = 1
        for p, t in zip(primes, ts):
            denom *= Fraction(p) ** (t - 1)
            if (t - 1) % 2:
                sign *= -eps[p]
        for d in divisors(shape.n):
            arg = -shape.Q / (denom * d * d)
            if arg.denominator != 1 or arg == 0:
                _diagnose(arg, "A_closed_form", strict)
                continue
            m = int(arg)
            out[m] = out.get(m, 0) + sign
    return tuple(sorted((m, a) for m, a in out.items() if a))


def A_closed_form(beta: DualVector, datum: MaassDatum, D: DiscGroup, strict: bool = False) -> FormalCoeffSum:
    if beta.is_zero():
        raise ValueError("A(0) is not defined: the expansion has no beta = 0 term")
    _check_level(datum, D)
    shape = beta_shape(beta, D)
    return FormalCoeffSum(shape.Q, dict(_closed_terms(shape, D.N, datum.sign_key(), strict)))


def closed_form_term_count(shape: BetaShape) -> int:
    """Number of (t, d) index tuples before cancellation."""
    k = len(divisors(shape.n))
    for u, dl in zip(shape.u, shape.delta):
        k *= 2 * u + dl + 1
    return k


def equivalence_check(beta: DualVector, datum: MaassDatum, D: DiscGroup, strict: bool = True) -> bool:
    return A_divisor_form(beta, datum, D, strict) == A_closed_form(beta, datum, D, strict)


def A(beta: DualVector, datum: MaassDatum, D: DiscGroup, strict: bool = False) -> FormalCoeffSum:
    return A_closed_form(beta, datum, D, strict)


def coefficient_table(D: DiscGroup, datum: MaassDatum, q_max, strict: bool = False) -> list[tuple[DualVector, FormalCoeffSum]]:
    """A(beta) for every nonzero beta with Q(beta) <= q_max; beta = 0 never appears."""
    out = []
    for beta, _ in D.dual.short_vectors(q_max):
        out.append((beta, A_closed_form(beta, datum, D, strict)))
    return out


def _divisor_key(beta: DualVector, D: DiscGroup) -> tuple:
    """Exactly the inputs A_divisor_form reads: (Q(beta/d), q_mu(class)) per d | content."""
    key = []
    for d in divisors(beta.content()):
        lam = beta.divide(d)
        key.append((D.dual.nrd(lam), D.q_mu(D.class_of(lam))))
    return tuple(key)


def equivalence_sweep(D: DiscGroup, q_max, sign_choices=None, strict: bool = True) -> dict:
    """Compare both coefficient formulas on every nonzero beta with Q(beta) <= q_max.

    Each beta is reduced once to the data both formulas depend on, then every
    distinct datum is compared for every sign choice.
    """
    from .vvlift import all_sign_choices

    groups: dict[tuple, int] = {}
    vectors = D.dual.short_vectors(q_max)
    for beta, _ in vectors:
        k = (_divisor_key(beta, D), beta_shape(beta, D))
        groups[k] = groups.get(k, 0) + 1
    choices = all_sign_choices(D.N) if sign_choices is None else sign_choices
    failures = []
    for signs in choices:
        datum = MaassDatum(D.N, signs)
        key = datum.sign_key()
        for (dkey, shape), count in groups.items():
            total: dict[int, Fraction] = {}
            for Q, q in dkey:
                for m, a in _c_mu_terms(Q, q, D.N, key, strict):
                    total[m] = total.get(m, 0) + a
            lhs = FormalCoeffSum(shape.Q, total)
            rhs = FormalCoeffSum(shape.Q, dict(_closed_terms(shape, D.N, key, strict)))
            if lhs != rhs:
                failures.append({"signs": dict(signs), "shape": shape, "vectors": count})
    return {
        "N": D.N,
        "q_max": fmt_rat(rat(q_max)),
        "vectors": len(vectors),
        "classes": len(groups),
        "sign_choices": len(choices),
        "failures": failures,
        "ok": not failures,
    }
