"""Orders in definite quaternion algebras as rank-4 lattices.

Vectors of the dual lattice O' are stored as integer coordinates with respect
to the dual basis. With A0 the Gram matrix of O (entries tr(e_s conj(e_t))),
the dual basis in O-coordinates is given by the columns of A0^{-1}, so a dual
vector with coordinates c has O-coordinates A0^{-1} c and

    Nrd = Q_A0 = c^T A0^{-1} c / 2,     in O  <=>  A0^{-1} c is integral.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from importlib import resources
from math import gcd, isqrt
from pathlib import Path
from typing import Iterator, Sequence

from .exactcore import (
    det,
    fmt_rat,
    inverse,
    is_integral,
    lcm,
    mat_vec,
    prime_factors,
    rat,
    snf,
)
from .quatalg import QuatAlg, QuatElt, parse_elt

CATALOG_LEVELS = (2, 3, 5, 7, 11, 13, 30)


class OrderError(ValueError):
    pass


@dataclass(frozen=True)
class Order:
    algebra: QuatAlg
    basis: tuple[QuatElt, ...]

    def __post_init__(self):
        if len(self.basis) != 4:
            raise OrderError("an order needs exactly four basis elements")
        if det(self.basis_matrix) == 0:
            raise OrderError("basis is linearly dependent")
        if self.coords_of(self.algebra.one()) is None:
            raise OrderError("1 is not in the lattice")
        for x in self.basis:
            for y in self.basis:
                if self.coords_of(x * y) is None:
                    raise OrderError("lattice is not closed under multiplication")
        if not is_integral(self.gram):
            raise OrderError("Gram matrix is not integral")
        if any(self.gram[i][i] % 2 for i in range(4)):
            raise OrderError("Gram matrix is not even")

    @cached_property
    def basis_matrix(self) -> list[list[Fraction]]:
        """Columns are the basis elements in (1, i, j, k) coordinates."""
        return [[self.basis[c].coords[r] for c in range(4)] for r in range(4)]

    @cached_property
    def _basis_inv(self) -> list[list[Fraction]]:
        return inverse(self.basis_matrix)

    @cached_property
    def gram(self) -> list[list[int]]:
        return [[int((x * y.conjugate()).trace()) for y in self.basis] for x in self.basis]

    @cached_property
    def gram_inv(self) -> list[list[Fraction]]:
        return inverse(self.gram)

    @property
    def level(self) -> int:
        return self.algebra.disc

    def coords_of(self, q: QuatElt) -> list[int] | None:
        """O-coordinates of q, or None if q is not in the lattice."""
        y = mat_vec(self._basis_inv, q.coords)
        return [int(v) for v in y] if is_integral(y) else None

    def rational_coords(self, q: QuatElt) -> list[Fraction]:
        return mat_vec(self._basis_inv, q.coords)

    def element(self, y: Sequence) -> QuatElt:
        return self.algebra.elt(*mat_vec(self.basis_matrix, y))

    def to_json(self) -> dict:
        return {"algebra": self.algebra.to_json(), "basis": [q.to_json() for q in self.basis]}

    @classmethod
    def from_json(cls, obj) -> "Order":
        alg = QuatAlg.from_json(obj["algebra"])
        return cls(alg, tuple(parse_elt(alg, row) for row in obj["basis"]))


def is_maximal(o: Order) -> tuple[bool, dict]:
    """Maximal iff det(A0) = N^2 with N the discriminant of the algebra."""
    d = det(o.gram)
    N = o.algebra.disc
    return d == N * N, {"det_gram": int(d), "disc": N, "expected": N * N}


def catalog_dir() -> Path | None:
    env = os.environ.get("CAPFORM_CATALOG_DIR")
    return Path(env) if env else None


def catalog_order(N: int) -> Order:
    name = f"order_{N}.json"
    override = catalog_dir()
    if override is not None:
        text = (override / name).read_text()
    else:
        res = resources.files("capform") / "catalog" / name
        if not res.is_file():
            raise OrderError(f"no catalog order for N={N}; available: {CATALOG_LEVELS}")
        text = res.read_text()
    o = Order.from_json(json.loads(text))
    ok, cert = is_maximal(o)
    if not ok or o.algebra.disc != N:
        raise OrderError(f"catalog order for N={N} failed verification: {cert}")
    return o


def load_order(source: str) -> Order:
    """``catalog:N`` or a path to an order JSON file."""
    if source.startswith("catalog:"):
        return catalog_order(int(source.split(":", 1)[1]))
    return Order.from_json(json.loads(Path(source).read_text()))


# ---------------------------------------------------------------------------
# dual lattice


@dataclass(frozen=True)
class DualVector:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __neg__(self):
        return DualVector(tuple(-c for c in self.coords))

    def __add__(self, other):
        return DualVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "DualVector":
        return DualVector(tuple(k * c for c in self.coords))

    def divide(self, k: int) -> "DualVector":
        if any(c % k for c in self.coords):
            raise ValueError(f"{self.coords} is not divisible by {k} in O'")
        return DualVector(tuple(c // k for c in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def content(self) -> int:
        return reduce(gcd, self.coords, 0)


class DualLattice:
    """O' = {x : tr(x O) in Z} with integer coordinates on the dual basis."""

    def __init__(self, order: Order):
        self.order = order
        if det(order.gram) == 0:
            raise OrderError("singular Gram matrix")
        G = order.gram_inv
        self.N = order.level
        self.scale = lcm(*(x.denominator for row in G for x in row))
        # integer form: Nrd(c) = c^T Gint c / (2 * scale)
        self.gram_int = [[int(x * self.scale) for x in row] for row in G]
        U, D, V = snf(order.gram)
        self.snf = (U, D, V)
        self.index = 1
        for i in range(4):
            self.index *= D[i][i]
        if self.index != abs(det(order.gram)):
            raise AssertionError("SNF index disagrees with det(A0)")

    @cached_property
    def basis(self) -> tuple[QuatElt, ...]:
        G = self.order.gram_inv
        return tuple(self.order.element([G[r][c] for r in range(4)]) for c in range(4))

    def nrd(self, v: DualVector) -> Fraction:
        c = v.coords
        G = self.gram_int
        s = sum(c[i] * G[i][j] * c[j] for i in range(4) for j in range(4))
        return Fraction(s, 2 * self.scale)

    def pair(self, v: DualVector, w: DualVector) -> Fraction:
        """tr(v conj(w)) = v^T A0^{-1} w."""
        G = self.gram_int
        s = sum(v.coords[i] * G[i][j] * w.coords[j] for i in range(4) for j in range(4))
        return Fraction(s, self.scale)

    def order_coords(self, v: DualVector) -> list[Fraction]:
        return mat_vec(self.order.gram_inv, v.coords)

    def in_order(self, v: DualVector) -> bool:
        return is_integral(self.order_coords(v))

    def to_quat(self, v: DualVector) -> QuatElt:
        return self.order.element(self.order_coords(v))

    def from_quat(self, q: QuatElt) -> DualVector:
        y = self.order.rational_coords(q)
        c = mat_vec(self.order.gram, y)
        if not is_integral(c):
            raise ValueError(f"{q.to_json()} is not in the dual lattice")
        return DualVector(tuple(int(x) for x in c))

    def from_order_coords(self, y: Sequence[int]) -> DualVector:
        return DualVector(tuple(int(x) for x in mat_vec(self.order.gram, y)))

    def short_vectors(self, bound) -> list[tuple[DualVector, Fraction]]:
        return short_vectors(self, bound)


def dual(o: Order) -> DualLattice:
    return DualLattice(o)


# ---------------------------------------------------------------------------
# short vectors (Fincke-Pohst over exact rationals)


def _ldl(G: Sequence[Sequence[Fraction]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """q(c) = sum_i d_i (c_i + sum_{j>i} m_ij c_j)^2 for q(c) = c^T G c."""
    n = len(G)
    A = [[Fraction(x) for x in row] for row in G]
    d = [Fraction(0)] * n
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            m[i][j] = A[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= m[i][j] * A[i][k]
    return d, m


def _int_range(center: Fraction, radius_sq: Fraction) -> range:
    """Integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    # floor(sqrt(radius_sq)) exactly, then pad by one and let callers filter
    r = isqrt(radius_sq.numerator // radius_sq.denominator) + 1
    lo = int(center) - r - 1
    hi = int(center) + r + 1
    xs = [x for x in range(lo, hi + 1) if (x - center) ** 2 <= radius_sq]
    return range(xs[0], xs[-1] + 1) if xs else range(0)


def short_vectors(d: DualLattice, bound) -> list[tuple[DualVector, Fraction]]:
    """All nonzero v in O' with Nrd(v) <= bound, sorted by (Nrd, coords)."""
    bound = rat(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    G = d.order.gram_inv  # Nrd = c^T G c / 2
    diag, m = _ldl(G)
    n = 4
    limit = 2 * bound
    out: list[tuple[DualVector, Fraction]] = []
    c = [0] * n

    def rec(i: int, remaining: Fraction):
        center = -sum(m[i][j] * c[j] for j in range(i + 1, n))
        for x in _int_range(center, remaining / diag[i]):
            c[i] = x
            used = diag[i] * (x - center) ** 2
            if i == 0:
                if any(c):
                    v = DualVector(tuple(c))
                    out.append((v, d.nrd(v)))
            else:
                rec(i - 1, remaining - used)
        c[i] = 0

    rec(n - 1, limit)
    out.sort(key=lambda t: (t[1], t[0].coords))
    return out


# ---------------------------------------------------------------------------
# primitive decomposition


@dataclass(frozen=True)
class PrimDecomp:
    u: dict[int, int]
    n: int
    beta0: DualVector
    content: int = field(default=1)


def primitive_decomposition(beta: DualVector, N: int) -> PrimDecomp:
    """beta = prod_{p|N} p^{u_p} * n * beta0 with beta0 primitive and gcd(n, N) = 1."""
    if beta.is_zero():
        raise ValueError("the zero vector has no primitive decomposition")
    m = beta.content()
    u = {}
    rest = m
    for p in prime_factors(N):
        k = 0
        while rest % p == 0:
            rest //= p
            k += 1
        u[p] = k
    return PrimDecomp(u=u, n=rest, beta0=beta.divide(m), content=m)


def order_summary(o: Order) -> dict:
    ok, cert = is_maximal(o)
    dl = dual(o)
    return {
        "algebra": o.algebra.describe(),
        "basis": [q.to_json() for q in o.basis],
        "gram": [[int(x) for x in row] for row in o.gram],
        "maximal": ok,
        "certificate": cert,
        "dual_index": dl.index,
        "dual_basis": [q.to_json() for q in dl.basis],
        "dual_gram": [[fmt_rat(x) for x in row] for row in o.gram_inv],
    }


def iter_classes_of_content(vectors, target_content: int) -> Iterator:
    for v, q in vectors:
        if v.content() == target_content:
            yield v, q
