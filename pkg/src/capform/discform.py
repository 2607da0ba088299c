"""The discriminant form D = O'/O with values of Q_D and B_D in Q/Z.

Sign convention: Q_D(mu) = -Nrd(lift of mu) mod 1, so that the form on D is
the one induced by the signature (1,5) lattice, whose restriction to O' is
minus the reduced norm.

Elements are stored as reduced coordinates with respect to the nontrivial
Smith invariant factors of A0; the class of a dual vector with coordinates c
is (U c)_i mod d_i where U A0 V = diag(d).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

import numpy as np

from .exactcore import (
    CycNum,
    e,
    fmt_rat,
    inverse,
    kronecker,
    lcm,
    legendre,
    prime_factors,
    root_of_unity,
)
from .orders import DualLattice, DualVector, Order

MAX_ENUMERATED = 10**6


@dataclass(frozen=True)
class DiscElt:
    group: "DiscGroup"
    coords: tuple[int, ...]

    def _same(self, other: "DiscElt"):
        if not isinstance(other, DiscElt) or other.group is not self.group:
            raise ValueError("elements of different discriminant groups")

    def __add__(self, other: "DiscElt") -> "DiscElt":
        self._same(other)
        return self.group.elt(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "DiscElt":
        return self.group.elt(tuple(-a for a in self.coords))

    def __sub__(self, other: "DiscElt") -> "DiscElt":
        return self + (-other)

    def __rmul__(self, k: int) -> "DiscElt":
        return self.group.elt(tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        return isinstance(other, DiscElt) and other.group is self.group and other.coords == self.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"DiscElt{self.coords}"


@dataclass(frozen=True)
class PSymbol:
    p: int
    sign: int
    even_type: bool = False  # 2_II

    def __str__(self):
        s = "+" if self.sign > 0 else "-"
        if self.p == 2:
            return f"2_II^{{{s}2}}" if self.even_type else f"2^{{{s}2}}"
        return f"{self.p}^{{{s}2}}"


class DiscGroup:
    def __init__(self, order: Order):
        self.order = order
        self.dual = DualLattice(order)
        self.N = order.level
        U, Dm, _ = self.dual.snf
        keep = [i for i in range(4) if Dm[i][i] > 1]
        self.invariants: tuple[int, ...] = tuple(Dm[i][i] for i in keep)
        self._U_rows = [U[i] for i in keep]
        Uinv = inverse(U)
        self.gens: tuple[DualVector, ...] = tuple(
            DualVector(tuple(int(Uinv[r][i]) for r in range(4))) for i in keep
        )
        self.size = 1
        for d in self.invariants:
            self.size *= d

        r = len(self.gens)
        dl = self.dual
        qg = [-dl.nrd(g) for g in self.gens]
        bg = [[-dl.pair(g, h) for h in self.gens] for g in self.gens]
        self.level = lcm(1, *(x.denominator for x in qg), *(x.denominator for row in bg for x in row))
        L = self.level
        # Q_D(x) = (sum_i q_i x_i^2 + sum_{i<j} b_ij x_i x_j) / L  mod 1
        self._q = [int(x * L) for x in qg]
        self._b = [[int(bg[i][j] * L) for j in range(r)] for i in range(r)]

    # -- elements --------------------------------------------------------

    def elt(self, coords) -> DiscElt:
        return DiscElt(self, tuple(int(c) % d for c, d in zip(coords, self.invariants)))

    def zero(self) -> DiscElt:
        return self.elt((0,) * len(self.invariants))

    def class_of(self, v: DualVector) -> DiscElt:
        return self.elt(tuple(sum(u * c for u, c in zip(row, v.coords)) for row in self._U_rows))

    def lift(self, mu: DiscElt) -> DualVector:
        out = DualVector((0, 0, 0, 0))
        for x, g in zip(mu.coords, self.gens):
            out = out + g.scale(x)
        return out

    def elements(self) -> list[DiscElt]:
        """All elements, lexicographic in reduced coordinates."""
        if self.size > MAX_ENUMERATED:
            raise ValueError(f"|D| = {self.size} is too large to enumerate")
        return self._elements

    @cached_property
    def _elements(self) -> list[DiscElt]:
        return [DiscElt(self, c) for c in itertools.product(*(range(d) for d in self.invariants))]

    def index(self, mu: DiscElt) -> int:
        i = 0
        for c, d in zip(mu.coords, self.invariants):
            i = i * d + c
        return i

    @cached_property
    def coord_array(self) -> np.ndarray:
        return np.array([m.coords for m in self.elements()], dtype=np.int64).reshape(self.size, -1)

    # -- quadratic data ---------------------------------------------------

    def q_num(self, mu: DiscElt) -> int:
        """L * Q_D(mu) mod L with L the level."""
        x = mu.coords
        r = len(x)
        s = sum(self._q[i] * x[i] * x[i] for i in range(r))
        s += sum(self._b[i][j] * x[i] * x[j] for i in range(r) for j in range(i + 1, r))
        return s % self.level

    def b_num(self, mu: DiscElt, nu: DiscElt) -> int:
        x, y = mu.coords, nu.coords
        r = len(x)
        return sum(self._b[i][j] * x[i] * y[j] for i in range(r) for j in range(r)) % self.level

    def qd(self, mu: DiscElt) -> Fraction:
        if mu.group is not self:
            raise ValueError("element of a different discriminant group")
        return Fraction(self.q_num(mu), self.level)

    def bd(self, mu: DiscElt, nu: DiscElt) -> Fraction:
        if mu.group is not self or nu.group is not self:
            raise ValueError("elements of a different discriminant group")
        return Fraction(self.b_num(mu, nu), self.level)

    @cached_property
    def q_table(self) -> np.ndarray:
        """Numerators L*Q_D for all elements in enumeration order."""
        X = self.coord_array
        q = np.array(self._q, dtype=np.int64)
        b = np.array(self._b, dtype=np.int64)
        s = (X * X) @ q
        r = X.shape[1]
        for i in range(r):
            for j in range(i + 1, r):
                s = s + b[i, j] * X[:, i] * X[:, j]
        return s % self.level

    @cached_property
    def b_table(self) -> np.ndarray:
        """Numerators L*B_D(mu, nu), an |D| x |D| array."""
        X = self.coord_array
        b = np.array(self._b, dtype=np.int64)
        return (X @ b @ X.T) % self.level

    @cached_property
    def neg_perm(self) -> list[int]:
        return [self.index(-m) for m in self.elements()]

    def q_mu(self, mu: DiscElt) -> int:
        return self.qd(mu).denominator

    # -- p-parts ------------------------------------------------------------

    def torsion(self, t: int) -> list[DiscElt]:
        """D_t = {mu : t mu = 0}."""
        ranges = []
        for d in self.invariants:
            step = d // gcd(d, t)
            ranges.append(range(0, d, step))
        return [DiscElt(self, c) for c in itertools.product(*ranges)]

    def p_part(self, p: int) -> list[DiscElt]:
        if self.N % p:
            raise ValueError(f"{p} does not divide N = {self.N}")
        return self.torsion(p)

    def p_basis(self, p: int) -> list[DiscElt]:
        """Generators of D_p taken from the Smith generators."""
        out = []
        for i, d in enumerate(self.invariants):
            if d % p == 0:
                c = [0] * len(self.invariants)
                c[i] = d // p
                out.append(self.elt(c))
        return out

    def is_anisotropic(self) -> bool:
        return not any(self.q_num(m) == 0 and not m.is_zero() for m in self.elements())


def disc_group(order: Order) -> DiscGroup:
    return DiscGroup(order)


def qd(mu: DiscElt) -> Fraction:
    return mu.group.qd(mu)


def bd(mu: DiscElt, nu: DiscElt) -> Fraction:
    if mu.group is not nu.group:
        raise ValueError("elements of different discriminant groups")
    return mu.group.bd(mu, nu)


def q_mu(mu: DiscElt) -> int:
    return mu.group.q_mu(mu)


def _exp_sum(D: DiscGroup, elts) -> CycNum:
    counts = Counter(D.q_num(m) for m in elts)
    total = CycNum.rational(0)
    for k in sorted(counts):
        total = total + counts[k] * root_of_unity(k, D.level)
    return total


def milgram_sum(D: DiscGroup) -> CycNum:
    """sum_{mu in D} e(Q_D(mu)), exactly."""
    counts = Counter(int(k) for k in D.q_table)
    total = CycNum.rational(0)
    for k in sorted(counts):
        total = total + counts[k] * root_of_unity(k, D.level)
    return total


def component_milgram_sum(D: DiscGroup, p: int) -> CycNum:
    return _exp_sum(D, D.p_part(p))


def gamma_from_milgram(D: DiscGroup, p: int) -> CycNum:
    """gamma_p(D_p) = (sum over D_p of e(Q_D)) / sqrt|D_p|, with |D_p| = p^2."""
    part = D.p_part(p)
    if len(part) != p * p:
        raise ValueError(f"|D_{p}| = {len(part)}, expected {p * p}")
    return _exp_sum(D, part) * Fraction(1, p)


def _diagonalise_mod_p(gram: list[list[int]], p: int) -> list[int]:
    """Diagonal entries of a symmetric matrix over F_p after congruence."""
    A = [[x % p for x in row] for row in gram]
    n = len(A)
    diag = []
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][i] % p), None)
        if piv is None:
            # all remaining diagonal entries vanish; make one nonzero
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if A[i][j] % p), None)
            if pair is None:
                diag.extend([0] * (n - k))
                break
            i, j = pair
            for t in range(n):  # row/col i += row/col j
                A[i][t] = (A[i][t] + A[j][t]) % p
            for t in range(n):
                A[t][i] = (A[t][i] + A[t][j]) % p
            piv = i
        A[k], A[piv] = A[piv], A[k]
        for row in A:
            row[k], row[piv] = row[piv], row[k]
        a = A[k][k]
        inv = pow(a, -1, p)
        for i in range(k + 1, n):
            f = A[i][k] * inv % p
            for t in range(n):
                A[i][t] = (A[i][t] - f * A[k][t]) % p
            for t in range(n):
                A[t][i] = (A[t][i] - f * A[t][k]) % p
        diag.append(a)
    return diag


def p_component_diagonal(D: DiscGroup, p: int) -> list[int]:
    """(a_1, a_2) with Q_D on D_p equivalent to a_1 x^2/p + a_2 y^2/p (p odd)."""
    if p == 2:
        raise ValueError("no diagonal form for the 2-part")
    basis = D.p_basis(p)
    # Q_D(x) = q(x)/p with q having Gram (2a_i) over F_p; recover it from B_D
    gram = []
    for g in basis:
        row = []
        for h in basis:
            v = D.bd(g, h) * p
            if v.denominator != 1:
                raise ValueError("B_D on D_p does not take values in (1/p)Z")
            row.append(int(v))
        gram.append(row)
    half = pow(2, -1, p)
    return [d * half % p for d in _diagonalise_mod_p(gram, p)]


def p_component_symbol(D: DiscGroup, p: int) -> PSymbol:
    if D.N % p:
        raise ValueError(f"{p} does not divide N = {D.N}")
    if p != 2:
        sign = 1
        for a in p_component_diagonal(D, p):
            sign *= legendre(2 * a, p)
        return PSymbol(p, sign)
    part = [m for m in D.p_part(2) if not m.is_zero()]
    vals = [D.qd(m) for m in part]
    if any(2 * v % 1 for v in vals):
        raise ValueError("2-part of D is not of even type")
    # an even binary 2-form is hyperbolic iff it has a nonzero isotropic vector
    sign = 1 if any(v == 0 for v in vals) else -1
    return PSymbol(2, sign, even_type=True)


def gamma_from_symbol(sym: PSymbol) -> CycNum:
    """Local Gauss-sum invariant from the genus symbol (p-excess / oddity rule)."""
    k = 0 if sym.sign > 0 else 4
    if sym.p == 2:
        return e(Fraction(k, 8))  # oddity of 2_II^{-2} is 4
    return e(Fraction(-(2 * (sym.p - 1) + k), 8))


def oddity(D: DiscGroup) -> int:
    return 4 if D.N % 2 == 0 else 0


def signature(D: DiscGroup) -> int:
    """sgn(D) mod 8, read off from the Milgram sum."""
    m = milgram_sum(D)
    n = D.size
    s = isqrt(n)
    if s * s != n:
        raise ValueError("|D| is not a square")
    unit = m * Fraction(1, s)
    for k in range(8):
        if unit == e(Fraction(k, 8)):
            return k
    raise AssertionError(f"Milgram sum {m} is not sqrt|D| times an eighth root of unity")


def xi_c(D: DiscGroup, c: int) -> CycNum:
    """xi_c = (-c / |D_{N/c}|) prod_{p | N/c} gamma_p(D_p)."""
    if D.N % c:
        raise ValueError(f"{c} does not divide N = {D.N}")
    M = D.N // c
    out = CycNum.rational(kronecker(-c, M * M))
    for p in prime_factors(M):
        out = out * gamma_from_milgram(D, p)
    return out


def report(D: DiscGroup) -> dict:
    syms = {}
    gam = {}
    for p in prime_factors(D.N):
        syms[str(p)] = str(p_component_symbol(D, p))
        gam[str(p)] = gamma_from_milgram(D, p).to_json()
    m = milgram_sum(D)
    return {
        "N": D.N,
        "invariant_factors": list(D.invariants),
        "order": D.size,
        "level": D.level,
        "milgram": fmt_rat(m.as_rational()) if m.is_rational() else m.to_json(),
        "signature": signature(D),
        "oddity": oddity(D),
        "symbols": syms,
        "gamma": gam,
        "generators": [list(g.coords) for g in D.gens],
    }
