"""Exact arithmetic shared by every other module.

Rationals are plain :class:`fractions.Fraction`. Matrices are lists of row
lists. Cyclotomic numbers live in Q[x]/Phi_M(x) with x = e(1/M).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence, Union

Rat = Fraction
RatLike = Union[int, Fraction]


# ---------------------------------------------------------------------------
# rationals and integers


def rat(x) -> Fraction:
    """Coerce ints, Fractions and strings like "-3/4" to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fmt_rat(x: RatLike) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


def factorint(n: int) -> dict[int, int]:
    """Trial-division factorisation; inputs here are small."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> list[int]:
    return sorted(factorint(n))


def is_prime(n: int) -> bool:
    return n >= 2 and factorint(n) == {n: 1}


def primes_upto(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorint(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def valuation(x: RatLike, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for positive n."""
    if n <= 0:
        raise ValueError("Kronecker symbol implemented for positive n only")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    return result * jacobi(a, n) if n > 1 else result


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# dense matrices (lists of rows)

Matrix = list  # list[list[RatLike]]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(r) for r in zip(*A)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def det(A: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    M = [[Fraction(x) for x in row] for row in A]
    n = len(M)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            out = -out
        out *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return out


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def is_integral(A: Iterable) -> bool:
    for x in A:
        if isinstance(x, (list, tuple)):
            if not is_integral(x):
                return False
        elif Fraction(x).denominator != 1:
            return False
    return True


def snf(A: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form of an integer matrix.

    Returns ``(U, D, V)`` with ``U @ A @ V == D``, U and V unimodular and the
    diagonal of D nonnegative with d1 | d2 | ... . Pivots are chosen as the
    smallest nonzero absolute value, scanning rows then columns, so the
    transforms are reproducible.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    for row in A:
        for x in row:
            if Fraction(x).denominator != 1:
                raise ValueError("snf needs an integer matrix")
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for M in (D, V):
            for row in M:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = D[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                return U, D, V
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            piv = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // piv))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // piv))
            if any(D[i][t] for i in range(t + 1, m)) or any(D[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv),
                None,
            )
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return U, D, V


# ---------------------------------------------------------------------------
# integer polynomials (coefficient lists, lowest degree first)


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Division by a monic (or unit-leading) polynomial b."""
    a = list(a)
    b = _poly_trim(list(b))
    lead = b[-1]
    if abs(lead) != 1:
        raise ValueError("divisor must have leading coefficient +-1")
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * lead
        q[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] -= c * y
    return _poly_trim(q), _poly_trim(a[: len(b) - 1])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple[int, ...]:
    """Phi_M as a coefficient tuple (lowest degree first).

    Computed by dividing x^M - 1 by Phi_d for every proper divisor d of M.
    """
    if M < 1:
        raise ValueError("cyclotomic polynomial needs M >= 1")
    num = [-1] + [0] * (M - 1) + [1]
    for d in divisors(M):
        if d < M:
            num, rem = poly_divmod(num, cyclotomic_polynomial(d))
            assert not rem
    return tuple(num)


def euler_phi(M: int) -> int:
    return len(cyclotomic_polynomial(M)) - 1


@lru_cache(maxsize=None)
def _power_table(M: int) -> tuple[tuple[int, ...], ...]:
    """Canonical integer coordinates of x^k mod Phi_M for k = 0..M-1."""
    phi = cyclotomic_polynomial(M)
    d = len(phi) - 1
    rows = []
    for k in range(M):
        mono = [0] * k + [1]
        _, r = poly_divmod(mono, phi)
        rows.append(tuple(r + [0] * (d - len(r))))
    return tuple(rows)


def _reduce_mod_phi(coeffs: Sequence, M: int) -> tuple:
    """Reduce an arbitrary-length coefficient list modulo Phi_M."""
    table = _power_table(M)
    d = euler_phi(M)
    out = [Fraction(0)] * d
    for k, c in enumerate(coeffs):
        if c:
            row = table[k % M]
            for i in range(d):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


# ---------------------------------------------------------------------------
# cyclotomic numbers


class CycNum:
    """Exact element of Q(zeta_M) stored as coefficients modulo Phi_M.

    Levels 1 and 2 both mean plain rationals and are normalised to level 1.
    Binary operations lift to the lcm of the two levels; rational results
    drop back to level 1.
    """

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs: Sequence[RatLike]):
        if level < 1:
            raise ValueError("level must be positive")
        coeffs = tuple(Fraction(c) for c in coeffs)
        d = euler_phi(level)
        if len(coeffs) != d:
            coeffs = _reduce_mod_phi(coeffs, level)
        if level == 2:
            level = 1
        if level > 1 and not any(coeffs[1:]):
            level, coeffs = 1, coeffs[:1]
        self.level = level
        self.coeffs = coeffs

    @classmethod
    def rational(cls, x: RatLike) -> "CycNum":
        return cls(1, [Fraction(x)])

    def is_rational(self) -> bool:
        return self.level == 1

    def as_rational(self) -> Fraction:
        if self.level != 1:
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def lift(self, level: int) -> "CycNum":
        """Re-express at a multiple of the current level (coefficients only)."""
        if level % self.level:
            raise ValueError(f"cannot lift level {self.level} to {level}")
        step = level // self.level
        big = [Fraction(0)] * (step * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            big[i * step] = c
        out = object.__new__(CycNum)
        out.level = level
        out.coeffs = _reduce_mod_phi(big, level) if level > 1 else tuple(big[:1])
        return out

    def _common(self, other: "CycNum") -> tuple[tuple, tuple, int]:
        M = lcm(self.level, other.level)
        a = self.coeffs if self.level == M else self.lift(M).coeffs
        b = other.coeffs if other.level == M else other.lift(M).coeffs
        return a, b, M

    @staticmethod
    def _coerce(x) -> "CycNum":
        if isinstance(x, CycNum):
            return x
        return CycNum.rational(rat(x))

    def __add__(self, other):
        other = self._coerce(other)
        a, b, M = self._common(other)
        return CycNum(M, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.level, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other.level == 1:
            return CycNum(self.level, [x * other.coeffs[0] for x in self.coeffs])
        if self.level == 1:
            return CycNum(other.level, [x * self.coeffs[0] for x in other.coeffs])
        a, b, M = self._common(other)
        return CycNum(M, _reduce_mod_phi(poly_mul(a, b), M))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_root_of_unity():
                raise ValueError("negative powers are only defined here for roots of unity")
            return self.conjugate() ** (-k)
        out = CycNum.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "CycNum":
        """Complex conjugation x -> x^{-1} = x^{M-1}."""
        if self.level == 1:
            return self
        M = self.level
        big = [Fraction(0)] * M
        for i, c in enumerate(self.coeffs):
            big[(-i) % M] += c
        return CycNum(M, big)

    def is_root_of_unity(self) -> bool:
        return self * self.conjugate() == 1

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b, _ = self._common(other)
        return a == b

    __hash__ = None  # type: ignore[assignment]

    def __complex__(self):
        import cmath

        z = cmath.exp(2j * cmath.pi / self.level)
        return complex(sum(float(c) * z**i for i, c in enumerate(self.coeffs)))

    def __repr__(self):
        if self.level == 1:
            return f"CycNum({fmt_rat(self.coeffs[0])})"
        return f"CycNum(level={self.level}, coeffs=[{', '.join(fmt_rat(c) for c in self.coeffs)}])"

    def to_json(self) -> dict:
        return {"level": self.level, "coeffs": [fmt_rat(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "CycNum":
        return cls(int(obj["level"]), [rat(c) for c in obj["coeffs"]])


def root_of_unity(numerator: int, denominator: int) -> CycNum:
    """e(numerator/denominator) at the reduced level."""
    if denominator < 1:
        raise ValueError("denominator must be positive")
    g = gcd(numerator, denominator)
    a, M = numerator // g, denominator // g
    a %= M
    if M == 1:
        return CycNum.rational(1)
    if M == 2:
        return CycNum.rational(-1)
    return CycNum(M, _power_table(M)[a])


def e(x: RatLike) -> CycNum:
    """e(x) = exp(2 pi i x) for rational x."""
    x = Fraction(x)
    return root_of_unity(x.numerator, x.denominator)


# ---------------------------------------------------------------------------
# polynomials in one formal variable (lambda, or X)


class LamPoly:
    """Univariate polynomial with exact rational coefficients.

    Zero coefficients are never stored. The variable name is cosmetic.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Mapping[int, RatLike] | None = None, var: str = "lam"):
        self.coeffs = {int(k): Fraction(v) for k, v in (coeffs or {}).items() if v}
        if any(k < 0 for k in self.coeffs):
            raise ValueError("negative degree")
        self.var = var

    @classmethod
    def const(cls, c: RatLike, var: str = "lam") -> "LamPoly":
        return cls({0: c}, var)

    @classmethod
    def gen(cls, var: str = "lam") -> "LamPoly":
        return cls({1: 1}, var)

    def _coerce(self, x) -> "LamPoly":
        if isinstance(x, LamPoly):
            return x
        return LamPoly.const(rat(x), self.var)

    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LamPoly(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LamPoly({k: -v for k, v in self.coeffs.items()}, self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[int, Fraction] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return LamPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = LamPoly.const(1, self.var)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        return sum((v * x**k for k, v in self.coeffs.items()), Fraction(0))

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs, reverse=True):
            c = fmt_rat(self.coeffs[k])
            parts.append(c if k == 0 else f"{c}*{self.var}" + (f"^{k}" if k > 1 else ""))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {str(k): fmt_rat(v) for k, v in sorted(self.coeffs.items())}

    @classmethod
    def from_json(cls, obj: Mapping, var: str = "lam") -> "LamPoly":
        return cls({int(k): rat(v) for k, v in obj.items()}, var)
