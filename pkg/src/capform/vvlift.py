"""Symbolic component expansion of the vector-valued lift L_D(f).

For an Atkin-Lehner eigenform f of level N the e_mu-component of L_D(f) is

    f_mu(tau) = sum_{c | N/q_mu} eps_{N/c} (-1)^{omega(N/c)}
                sum_{n != 0, n c/N = -Q_D(mu) mod 1} c(n) W(4 pi |n| v c/N) e(n u c/N)

and is stored as a list of ``VVComponentTerm`` per value of Q_D(mu).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .discform import DiscGroup
from .exactcore import CycNum, divisors, e, fmt_rat, prime_factors, root_of_unity
from .weilrep import CycMatrix, full_module, random_gamma0, rho_apply


class LevelMismatch(ValueError):
    pass


@dataclass(frozen=True)
class MaassDatum:
    level: int
    al_signs: Mapping[int, int] = field(default_factory=dict)
    r: object = "r"

    def __post_init__(self):
        primes = prime_factors(self.level)
        if len(primes) % 2 == 0:
            raise ValueError("level must have an odd number of prime factors")
        if any(self.level % (p * p) == 0 for p in primes):
            raise ValueError("level must be square-free")
        signs = {}
        for p, s in dict(self.al_signs).items():
            p, s = int(p), int(s)
            if p not in primes:
                raise ValueError(f"Atkin-Lehner sign given for {p}, which does not divide {self.level}")
            if s not in (1, -1):
                raise ValueError(f"Atkin-Lehner sign at {p} must be +1 or -1, got {s}")
            signs[p] = s
        for p in primes:
            signs.setdefault(p, 1)
        object.__setattr__(self, "al_signs", dict(sorted(signs.items())))

    def eps(self, m: int) -> int:
        """eps_m = prod_{p | m} eps_p for m | N."""
        out = 1
        for p in prime_factors(m):
            out *= self.al_signs[p]
        return out

    def sign_key(self) -> tuple:
        return tuple(self.al_signs.items())

    def to_json(self) -> dict:
        return {"level": self.level, "al_signs": {str(p): s for p, s in self.al_signs.items()}, "r": self.r}


def parse_al_signs(text: str | None) -> dict[int, int]:
    """``"2:-1,3:1"`` -> {2: -1, 3: 1}."""
    out: dict[int, int] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        p, _, s = item.partition(":")
        if not _:
            raise ValueError(f"malformed Atkin-Lehner sign {item!r}; expected p:s")
        out[int(p)] = int(s)
    return out


def all_sign_choices(N: int) -> list[dict[int, int]]:
    primes = prime_factors(N)
    out = []
    for mask in range(2 ** len(primes)):
        out.append({p: (-1 if mask >> i & 1 else 1) for i, p in enumerate(primes)})
    return out


@dataclass(frozen=True)
class VVComponentTerm:
    q_class: Fraction  # Q_D(mu)
    c: int
    modulus: int  # N/c
    residue: int  # n = residue mod modulus
    scale: Fraction  # c/N
    coeff: int

    def admits(self, n: int) -> bool:
        return n != 0 and (n - self.residue) % self.modulus == 0

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "modulus": self.modulus,
            "residue": self.residue,
            "scale": fmt_rat(self.scale),
            "coeff": self.coeff,
        }


def component_terms(q_class: Fraction, datum: MaassDatum) -> list[VVComponentTerm]:
    N = datum.level
    q = Fraction(q_class).denominator
    if N % q:
        raise ValueError(f"Q_D value {q_class} has denominator not dividing {N}")
    terms = []
    for c in divisors(N // q):
        M = N // c
        residue = int(-q_class * M) % M
        coeff = datum.eps(M) * (-1) ** len(prime_factors(M))
        terms.append(VVComponentTerm(Fraction(q_class), c, M, residue, Fraction(c, N), coeff))
    return terms


def lift_components(datum: MaassDatum, D: DiscGroup) -> dict[Fraction, list[VVComponentTerm]]:
    if datum.level != D.level:
        raise LevelMismatch(f"datum level {datum.level} differs from level {D.level} of D")
    classes = sorted({D.qd(m) for m in D.elements()})
    return {q: component_terms(q, datum) for q in classes}


def terms_for(mu, datum: MaassDatum) -> list[VVComponentTerm]:
    return component_terms(mu.group.qd(mu), datum)


def t_transform_check(components: Mapping[Fraction, list[VVComponentTerm]], samples: int = 5) -> dict[Fraction, CycNum]:
    """Per class, the common factor e(n c/N) picked up under tau -> tau + 1."""
    out = {}
    for q, terms in components.items():
        const = None
        for t in terms:
            for k in range(-samples, samples + 1):
                n = t.residue + k * t.modulus
                if n == 0:
                    continue
                val = e(n * t.scale)
                if const is None:
                    const = val
                elif val != const:
                    raise AssertionError(f"class {q}: inconsistent T-factor {val} vs {const}")
        out[q] = const if const is not None else CycNum.rational(1)
    return out


def t_sign_report(D: DiscGroup, datum: MaassDatum) -> list[dict]:
    """Compare the T-factor of each component with the rho_D(T) eigenvalue e(+Q_D)."""
    comps = lift_components(datum, D)
    found = t_transform_check(comps)
    rows = []
    for q, const in found.items():
        rows.append(
            {
                "Q": fmt_rat(q),
                "factor_equals_e(-Q)": const == e(-q),
                "factor_equals_e(+Q)": const == e(q),
            }
        )
    return rows


def welldefinedness_check(D: DiscGroup, samples: int = 25, seed: int = 0, bound: int = 10**4) -> bool:
    """rho_D(gamma) e_0 = e_0 for pseudorandom gamma in Gamma_0(N)."""
    mod = full_module(D)
    e0 = CycMatrix.basis_vector(mod.size, 0, mod.level)
    rng = random.Random(seed)
    gammas = [((1, 0), (0, 1)), ((1, 1), (0, 1))]
    gammas += [random_gamma0(D.N, rng, bound) for _ in range(samples)]
    return all(rho_apply(g, mod, e0) == e0 for g in gammas)


def geometric_sum(modulus: int, shift: int) -> CycNum:
    """sum_{k mod m} e(k shift / m)."""
    total = CycNum.rational(0)
    for k in range(modulus):
        total = total + root_of_unity(k * shift, modulus)
    return total


def geometric_sum_check(max_modulus: int = 30) -> bool:
    for m in range(1, max_modulus + 1):
        for shift in range(m):
            expected = m if shift % m == 0 else 0
            if geometric_sum(m, shift) != expected:
                return False
    return True


def components_json(components: Mapping[Fraction, list[VVComponentTerm]]) -> list[dict]:
    return [{"Q": fmt_rat(q), "terms": [t.to_json() for t in terms]} for q, terms in components.items()]
