"""Definite rational quaternion algebras (a, b / Q) and their elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactcore import RatLike, fmt_rat, prime_factors, rat, valuation

INFINITY = "inf"


def _square_class_2(u: Fraction) -> int:
    """For a 2-adic unit given as a rational, return it modulo 8."""
    return (u.numerator * pow(u.denominator, -1, 8)) % 8


def hilbert_symbol(a: RatLike, b: RatLike, p) -> int:
    """Hilbert symbol (a, b)_p for nonzero rationals; ``p`` a prime or "inf"."""
    a, b = rat(a), rat(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p == INFINITY:
        return -1 if (a < 0 and b < 0) else 1
    p = int(p)
    alpha, beta = valuation(a, p), valuation(b, p)
    u = a / Fraction(p) ** alpha
    v = b / Fraction(p) ** beta
    if p != 2:
        def leg(x: Fraction) -> int:
            n = (x.numerator * pow(x.denominator, -1, p)) % p
            return 1 if pow(n, (p - 1) // 2, p) == 1 else -1

        sign = -1 if (alpha * beta % 2 and p % 4 == 3) else 1
        return sign * leg(u) ** (beta % 2) * leg(v) ** (alpha % 2)
    u8, v8 = _square_class_2(u), _square_class_2(v)
    eps = lambda x: ((x - 1) // 2) % 2  # noqa: E731
    omega = lambda x: ((x * x - 1) // 8) % 2  # noqa: E731
    exp = eps(u8) * eps(v8) + alpha * omega(v8) + beta * omega(u8)
    return -1 if exp % 2 else 1


def ramified_primes(a: RatLike, b: RatLike) -> list[int]:
    """Finite primes where (a, b / Q) does not split."""
    a, b = rat(a), rat(b)
    candidates = {2}
    for x in (a.numerator, a.denominator, b.numerator, b.denominator):
        if abs(x) > 1:
            candidates.update(prime_factors(x))
    return sorted(p for p in candidates if hilbert_symbol(a, b, p) == -1)


@dataclass(frozen=True)
class QuatAlg:
    """B = Q + Qi + Qj + Qk with i^2 = a, j^2 = b, ij = -ji = k (definite)."""

    a: Fraction
    b: Fraction
    ramified_finite: tuple[int, ...] = field(init=False)
    disc: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a", rat(self.a))
        object.__setattr__(self, "b", rat(self.b))
        if not (self.a < 0 and self.b < 0):
            raise ValueError("only definite algebras (a, b < 0) are supported")
        ram = tuple(ramified_primes(self.a, self.b))
        if len(ram) % 2 == 0:
            raise AssertionError(f"definite algebra with an even ramification set {ram}")
        disc = 1
        for p in ram:
            disc *= p
        object.__setattr__(self, "ramified_finite", ram)
        object.__setattr__(self, "disc", disc)

    def elt(self, w: RatLike = 0, x: RatLike = 0, y: RatLike = 0, z: RatLike = 0) -> "QuatElt":
        return QuatElt(self, (rat(w), rat(x), rat(y), rat(z)))

    def one(self) -> "QuatElt":
        return self.elt(1)

    def basis(self) -> tuple["QuatElt", ...]:
        return tuple(self.elt(*(int(i == j) for j in range(4))) for i in range(4))

    def to_json(self) -> dict:
        return {"a": fmt_rat(self.a), "b": fmt_rat(self.b)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "QuatAlg":
        return cls(rat(obj["a"]), rat(obj["b"]))

    def describe(self) -> dict:
        return {**self.to_json(), "ramified_finite": list(self.ramified_finite), "disc": self.disc}


@dataclass(frozen=True)
class QuatElt:
    alg: QuatAlg
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def _check(self, other: "QuatElt"):
        if not isinstance(other, QuatElt):
            raise TypeError(f"expected a quaternion, got {type(other).__name__}")
        if other.alg != self.alg:
            raise ValueError("quaternions belong to different algebras")

    def __add__(self, other: "QuatElt") -> "QuatElt":
        self._check(other)
        return QuatElt(self.alg, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: "QuatElt") -> "QuatElt":
        return self + (-other)

    def __neg__(self) -> "QuatElt":
        return QuatElt(self.alg, tuple(-x for x in self.coords))

    def scale(self, c: RatLike) -> "QuatElt":
        c = rat(c)
        return QuatElt(self.alg, tuple(c * x for x in self.coords))

    def __mul__(self, other):
        if not isinstance(other, QuatElt):
            return self.scale(other)
        self._check(other)
        a, b = self.alg.a, self.alg.b
        w1, x1, y1, z1 = self.coords
        w2, x2, y2, z2 = other.coords
        return QuatElt(
            self.alg,
            (
                w1 * w2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
                w1 * x2 + x1 * w2 - b * y1 * z2 + b * z1 * y2,
                w1 * y2 + y1 * w2 + a * x1 * z2 - a * z1 * x2,
                w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
            ),
        )

    def __rmul__(self, c):
        return self.scale(c)

    def conjugate(self) -> "QuatElt":
        w, x, y, z = self.coords
        return QuatElt(self.alg, (w, -x, -y, -z))

    def trace(self) -> Fraction:
        return 2 * self.coords[0]

    def nrd(self) -> Fraction:
        a, b = self.alg.a, self.alg.b
        w, x, y, z = self.coords
        return w * w - a * x * x - b * y * y + a * b * z * z

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> list[str]:
        return [fmt_rat(c) for c in self.coords]


def trace_norm(q: QuatElt) -> tuple[Fraction, Fraction]:
    return q.trace(), q.nrd()


def parse_elt(alg: QuatAlg, coords: Sequence) -> QuatElt:
    if len(coords) != 4:
        raise ValueError("a quaternion needs four coordinates")
    return alg.elt(*(rat(c) for c in coords))
