"""Satake parameters of the lift and the local standard L-factors.

Parameters are monomials p^a * alpha^b where alpha + 1/alpha = lambda_p is the
Hecke eigenvalue of f. Local factors are products of (1 - m X) with X = p^-s,
expanded with coefficients in Q[lambda] through T_k = alpha^k + alpha^-k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .exactcore import LamPoly, fmt_rat, is_prime, rat


@dataclass(frozen=True, order=True)
class SatakeMonomial:
    pexp: Fraction
    aexp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pexp", rat(self.pexp))
        object.__setattr__(self, "aexp", int(self.aexp))

    def inverse(self) -> "SatakeMonomial":
        return SatakeMonomial(-self.pexp, -self.aexp)

    def __mul__(self, other: "SatakeMonomial") -> "SatakeMonomial":
        return SatakeMonomial(self.pexp + other.pexp, self.aexp + other.aexp)

    def __truediv__(self, other: "SatakeMonomial") -> "SatakeMonomial":
        return self * other.inverse()

    def canonical(self) -> "SatakeMonomial":
        return max(self, self.inverse())

    def is_integral(self) -> bool:
        return self.pexp.denominator == 1

    def __str__(self) -> str:
        parts = []
        if self.pexp:
            parts.append("p" if self.pexp == 1 else f"p^{fmt_rat(self.pexp)}")
        if self.aexp:
            parts.append("alpha" if self.aexp == 1 else f"alpha^{self.aexp}")
        return "*".join(parts) or "1"


def M(pexp, aexp: int = 0) -> SatakeMonomial:
    return SatakeMonomial(rat(pexp), aexp)


def satake_lift(p: int, ramified: bool = False) -> list[SatakeMonomial]:
    """Unramified: {alpha^2, p, 1, 1, 1/p, alpha^-2}; ramified: {p, 1, 1/p, 1/p}."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if ramified:
        return [M(1), M(0), M(-1), M(-1)]
    return [M(0, 2), M(1), M(0), M(0), M(-1), M(0, -2)]


def ramified_chi(p: int) -> list[SatakeMonomial]:
    """chi(p) = p, up to the Weyl group: the pair {p, 1/p}."""
    return [M(1), M(-1)]


def cap_parameters(p: int) -> list[SatakeMonomial]:
    """GL_4 parameters (p^1/2 alpha, p^1/2 / alpha, p^-1/2 alpha, p^-1/2 / alpha)."""
    h = Fraction(1, 2)
    return [M(h, 1), M(h, -1), M(-h, 1), M(-h, -1)]


def _four(xs: Sequence[SatakeMonomial]) -> Sequence[SatakeMonomial]:
    if len(xs) != 4:
        raise ValueError(f"expected 4 parameters, got {len(xs)}")
    return xs


def torus_gl4_to_so33(xs: Sequence[SatakeMonomial]) -> list[SatakeMonomial]:
    x1, x2, x3, x4 = _four(xs)
    return [x1 * x2, x1 * x4, x1 * x3, x2 * x4, x2 * x3, x3 * x4]


def torus_gl2xgl2_to_gso22(xs: Sequence[SatakeMonomial]) -> list[SatakeMonomial]:
    a1, a2, a3, a4 = _four(xs)
    return [a1 / a3, a1 / a4, a2 / a3, a2 / a4]


def torus_maps(xs: Sequence[SatakeMonomial]) -> dict[str, list[SatakeMonomial]]:
    return {"SO(3,3)": torus_gl4_to_so33(xs), "GSO(2,2)": torus_gl2xgl2_to_gso22(xs)}


def exterior_square(xs: Sequence[SatakeMonomial]) -> list[SatakeMonomial]:
    return [a * b for a, b in combinations(xs, 2)]


def weyl_canonical(ms: Iterable[SatakeMonomial]) -> list[SatakeMonomial]:
    return sorted(m.canonical() for m in ms)


def weyl_equivalent(m1: Sequence[SatakeMonomial], m2: Sequence[SatakeMonomial]) -> bool:
    """Equal up to permutation and inversion of individual entries."""
    return len(m1) == len(m2) and weyl_canonical(m1) == weyl_canonical(m2)


def is_self_dual(ms: Sequence[SatakeMonomial]) -> bool:
    return sorted(ms) == sorted(m.inverse() for m in ms)


def nontempered_witness(ms: Sequence[SatakeMonomial]) -> bool:
    """Some entry has |p-exponent| >= 1, so it is not of absolute value 1 for any lambda."""
    return any(abs(m.pexp) >= 1 for m in ms)


# ---------------------------------------------------------------- L-factors


def chebyshev_T(k: int) -> LamPoly:
    """alpha^k + alpha^-k as a polynomial in lambda = alpha + 1/alpha."""
    k = abs(k)
    lam = LamPoly.gen()
    a, b = LamPoly.const(2), lam
    if k == 0:
        return a
    for _ in range(k - 1):
        a, b = b, lam * b - a
    return b


def _laurent_to_lam(c: dict[int, Fraction]) -> LamPoly:
    out = LamPoly.const(c.get(0, 0))
    for k, v in c.items():
        if k % 2:
            raise ValueError(f"odd power alpha^{k} in an expanded factor")
        if k > 0:
            if c.get(-k, 0) != v:
                raise ValueError(f"coefficients of alpha^{k} and alpha^{-k} differ")
            out = out + v * chebyshev_T(k)
        elif k < 0 and -k not in c:
            raise ValueError(f"alpha^{k} has no partner alpha^{-k}")
    return out


@dataclass(frozen=True)
class LFactorPoly:
    """1 + c_1 X + ... + c_d X^d with c_k in Q[lambda]; the local factor is its inverse."""

    p: int
    coeffs: tuple[LamPoly, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("constant term must be 1")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_monomials(cls, p: int, ms: Sequence[SatakeMonomial]) -> "LFactorPoly":
        """Expand prod (1 - m X)."""
        poly: list[dict[int, Fraction]] = [{0: Fraction(1)}]
        for m in ms:
            if not m.is_integral():
                raise ValueError(f"non-integral p-exponent in {m}")
            val = Fraction(p) ** int(m.pexp)
            nxt: list[dict[int, Fraction]] = [dict(c) for c in poly] + [{}]
            for k, c in enumerate(poly):
                for a, v in c.items():
                    d = nxt[k + 1]
                    d[m.aexp + a] = d.get(m.aexp + a, 0) - val * v
            poly = nxt
        coeffs = tuple(_laurent_to_lam({a: v for a, v in c.items() if v}) for c in poly)
        return cls(p, coeffs)

    def __mul__(self, other: "LFactorPoly") -> "LFactorPoly":
        if other.p != self.p:
            raise ValueError("different primes")
        out = [LamPoly() for _ in range(self.degree + other.degree + 1)]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return LFactorPoly(self.p, tuple(out))

    def at(self, lam) -> list[Fraction]:
        return [c(rat(lam)) for c in self.coeffs]

    def is_palindromic(self) -> bool:
        return all(self.coeffs[k] == self.coeffs[self.degree - k] for k in range(self.degree + 1))

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.coeffs]


def local_factor_unramified(p: int) -> LFactorPoly:
    return LFactorPoly.from_monomials(p, satake_lift(p))


def local_factor_ramified(p: int) -> LFactorPoly:
    """(1 - pX)(1 - X)(1 - X/p)^2, i.e. the unramified recipe at chi(p) = p."""
    return LFactorPoly.from_monomials(p, satake_lift(p, ramified=True))


def zeta_factor(p: int, shift: int) -> LFactorPoly:
    """Inverse Euler factor of zeta(s + shift): 1 - p^-shift X."""
    return LFactorPoly.from_monomials(p, [M(-shift)])


def sym2_unramified(p: int) -> LFactorPoly:
    return LFactorPoly.from_monomials(p, [M(0, 2), M(0), M(0, -2)])


def sym2_steinberg(p: int) -> LFactorPoly:
    return zeta_factor(p, 1)


def std_identity_check(p: int, ramified: bool = False) -> dict:
    """The standard factor against sym^2(f) times zeta(s-1) zeta(s) zeta(s+1)."""
    zetas = zeta_factor(p, -1) * zeta_factor(p, 0) * zeta_factor(p, 1)
    if ramified:
        lhs = local_factor_ramified(p)
        rhs = sym2_steinberg(p) * zetas
        # second route: zeta(s+1) zeta(s-1) L(sigma x sigma, s) with L(sigma x sigma) = zeta(s) zeta(s+1)
        jo = zeta_factor(p, 1) * zeta_factor(p, -1) * (zeta_factor(p, 0) * zeta_factor(p, 1))
        checks = {"sym2_route": lhs == rhs, "jo_route": lhs == jo}
        multiset = True
    else:
        lhs = local_factor_unramified(p)
        rhs = sym2_unramified(p) * zetas
        jo = None
        multiset = sorted(satake_lift(p)) == sorted([M(0, 2), M(0), M(0, -2), M(1), M(0), M(-1)])
        checks = {
            "multiset": multiset,
            "polynomial": lhs == rhs,
            "exterior_square": weyl_equivalent(exterior_square(cap_parameters(p)), satake_lift(p)),
        }
    return {
        "p": p,
        "ramified": ramified,
        "parameters": [str(m) for m in satake_lift(p, ramified)],
        "factor": lhs.to_json(),
        "product_side": rhs.to_json(),
        "checks": checks,
        "ok": all(checks.values()),
    }


def cap_consistency(p: int) -> dict:
    """Torus translation of the GL_4 parameters against satake_lift."""
    a = cap_parameters(p)
    so33 = torus_gl4_to_so33(a)
    gso = torus_gl2xgl2_to_gso22(a)
    ok_integral = all(m.is_integral() for m in so33 + gso)
    if not ok_integral:
        raise AssertionError("translated parameters must have integral p-exponents")
    return {
        "p": p,
        "so33": [str(m) for m in so33],
        "gso22": [str(m) for m in gso],
        "so33_matches_lift": weyl_equivalent(so33, satake_lift(p)),
        "gso22_expected": sorted(gso) == sorted([M(1), M(1, 2), M(1, -2), M(1)]),
    }
