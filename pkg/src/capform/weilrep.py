"""Exact Weil representation rho_D of SL2(Z) on C[D].

Matrices act on column vectors: rho(M) e_mu = sum_nu rho(M)[nu, mu] e_nu, so
rho(M1 M2) = rho(M1) rho(M2) as matrices. Basis order is the enumeration
order of the discriminant group (lexicographic in reduced coordinates).

Entries live in Q(zeta_L), L the level of D, and are stored as integer
coordinate arrays modulo Phi_L over a common denominator (``CycMatrix``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

import numpy as np

from .discform import DiscElt, DiscGroup, milgram_sum
from .exactcore import CycNum, _power_table, euler_phi, prime_factors, root_of_unity, xgcd

_FLOAT_EXACT = 2**52
_INT_SAFE = 2**62


@lru_cache(maxsize=None)
def _powers(M: int) -> np.ndarray:
    """Row k: coordinates of x^k mod Phi_M, k = 0..M-1."""
    return np.array(_power_table(M), dtype=np.int64).reshape(M, euler_phi(M))


@lru_cache(maxsize=None)
def _mult_tables(M: int) -> np.ndarray:
    """W[a, j] = coordinates of x^(a+j) mod Phi_M, so y * x^a = y @ W[a]."""
    P = _powers(M)
    d = P.shape[1]
    idx = (np.arange(d)[:, None] + np.arange(d)[None, :]) % M
    return P[idx]


def _absmax(x: np.ndarray) -> int:
    return int(np.abs(x).max()) if x.size else 0


class CycMatrix:
    """Matrix over Q(zeta_M): ``data[i, j]`` holds canonical coordinates, divided by ``den``."""

    __slots__ = ("level", "data", "den", "_cache")

    def __init__(self, level: int, data: np.ndarray, den: int = 1, normalise: bool = True):
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.level = level
        self.data = data
        self.den = int(den)
        self._cache: dict = {}
        if normalise:
            self._normalise()

    def _float_data(self) -> tuple[np.ndarray, int]:
        # data is never mutated after construction, so this is safe to keep
        if "f" not in self._cache:
            self._cache["f"] = (self.data.astype(np.float64), _absmax(self.data))
        return self._cache["f"]

    def _normalise(self):
        if self.data.dtype == object:
            g = 0
            for x in self.data.flat:
                g = gcd(g, int(x))
                if g == 1:
                    break
        else:
            g = int(np.gcd.reduce(self.data, axis=None)) if self.data.size else 0
        g = gcd(g, self.den)
        if g > 1:
            self.data = self.data // g
            self.den //= g
        if self.data.dtype == object and (self.data.size == 0 or int(np.abs(self.data).max()) < _INT_SAFE):
            self.data = self.data.astype(np.int64)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def degree(self) -> int:
        return self.data.shape[2]

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_exponents(cls, level: int, exps: np.ndarray, mask: np.ndarray | None = None, scale: Fraction = Fraction(1)):
        """Entries scale * e(exps / level), zero where mask is False."""
        P = _powers(level)
        data = P[np.mod(exps, level)]
        if mask is not None:
            data = data * mask[..., None]
        scale = Fraction(scale)
        return cls(level, data * scale.numerator, scale.denominator)

    @classmethod
    def identity(cls, n: int, level: int) -> "CycMatrix":
        return cls.permutation(list(range(n)), level)

    @classmethod
    def permutation(cls, perm, level: int) -> "CycMatrix":
        """Matrix sending e_j to e_{perm[j]}."""
        n = len(perm)
        d = euler_phi(level)
        data = np.zeros((n, n, d), dtype=np.int64)
        data[np.asarray(perm), np.arange(n), 0] = 1
        return cls(level, data, 1)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "CycMatrix"):
        if not isinstance(other, CycMatrix):
            raise TypeError("expected a CycMatrix")
        if other.level != self.level:
            raise ValueError(f"levels differ: {self.level} vs {other.level}")

    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        self._check(other)
        if self.shape[1] != other.shape[0]:
            raise ValueError("shape mismatch")
        W = _mult_tables(self.level)
        A, B = self.data, other.data
        if A.dtype == object or B.dtype == object:
            Bx = np.tensordot(B.astype(object), W.astype(object), axes=([2], [1]))  # (m, k, a, t)
            out = np.tensordot(A.astype(object), Bx, axes=([1, 2], [0, 2]))
            return CycMatrix(self.level, out, self.den * other.den)
        Bx = np.tensordot(B, W, axes=([2], [1]))
        Af, amax = self._float_data()
        bound = amax * _absmax(Bx) * A.shape[1] * A.shape[2]
        if bound < _FLOAT_EXACT:
            out = np.rint(np.tensordot(Af, Bx.astype(np.float64), axes=([1, 2], [0, 2])))
            out = out.astype(np.int64)
        elif bound < _INT_SAFE:
            out = np.tensordot(A, Bx, axes=([1, 2], [0, 2]))
        else:
            out = np.tensordot(A.astype(object), Bx.astype(object), axes=([1, 2], [0, 2]))
        return CycMatrix(self.level, out, self.den * other.den)

    def scale_columns_by_roots(self, exps) -> "CycMatrix":
        """self @ diag(e(exps / level))."""
        return self._rotate(np.asarray(exps), axis=1)

    def scale_rows_by_roots(self, exps) -> "CycMatrix":
        """diag(e(exps / level)) @ self."""
        return self._rotate(np.asarray(exps), axis=0)

    def _rotate(self, exps: np.ndarray, axis: int) -> "CycMatrix":
        M, d = self.level, self.degree
        P = _powers(M)
        # R[j, t, u]: coordinate u of x^(t + s_j)
        idx = (np.arange(d)[None, :] + np.mod(exps, M)[:, None]) % M
        R = P[idx]
        if self.data.dtype == object:
            R = R.astype(object)
        if axis == 1:
            out = np.einsum("ijt,jtu->iju", self.data, R)
        else:
            out = np.einsum("ijt,itu->iju", self.data, R)
        return CycMatrix(self.level, out, self.den)

    def conjugate_transpose(self) -> "CycMatrix":
        M, d = self.level, self.degree
        P = _powers(M)
        C = P[(-np.arange(d)) % M]  # x^t -> x^{-t}
        if self.data.dtype == object:
            C = C.astype(object)
        out = np.tensordot(self.data, C, axes=([2], [0]))
        return CycMatrix(M, np.ascontiguousarray(out.transpose(1, 0, 2)), self.den)

    def __neg__(self) -> "CycMatrix":
        return CycMatrix(self.level, -self.data, self.den, normalise=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycMatrix) or other.level != self.level or other.shape != self.shape:
            return False
        return self.den == other.den and bool(np.array_equal(self.data, other.data))

    __hash__ = None  # type: ignore[assignment]

    def entry(self, i: int, j: int) -> CycNum:
        return CycNum(self.level, [Fraction(int(c), self.den) for c in self.data[i, j]])

    def apply(self, vec: "CycMatrix") -> "CycMatrix":
        return self @ vec

    def column(self, j: int) -> "CycMatrix":
        return CycMatrix(self.level, self.data[:, j : j + 1, :].copy(), self.den)

    @classmethod
    def basis_vector(cls, n: int, i: int, level: int) -> "CycMatrix":
        d = euler_phi(level)
        data = np.zeros((n, 1, d), dtype=np.int64)
        data[i, 0, 0] = 1
        return cls(level, data, 1)

    def monomial_form(self) -> tuple[list[int], list[int]] | None:
        """(perm, exps) with self = sum_j e(exps[j]/level) E_{perm[j], j}, or None."""
        n, m = self.shape
        if n != m or self.den != 1:
            return None
        lookup = {tuple(int(x) for x in row): k for k, row in enumerate(_powers(self.level))}
        nz = self.data.any(axis=2)
        perm, exps = [], []
        for j in range(m):
            rows = np.flatnonzero(nz[:, j])
            if len(rows) != 1:
                return None
            i = int(rows[0])
            k = lookup.get(tuple(int(x) for x in self.data[i, j]))
            if k is None:
                return None
            perm.append(i)
            exps.append(k)
        return perm, exps

    def to_json(self) -> list[list[dict]]:
        n, m = self.shape
        return [[self.entry(i, j).to_json() for j in range(m)] for i in range(n)]

    def __repr__(self):
        return f"CycMatrix(level={self.level}, shape={self.shape}, den={self.den})"


# ---------------------------------------------------------------------------
# finite quadratic modules (D and its p-parts)


@dataclass
class QuadModule:
    """A subgroup of a discriminant group with the inherited quadratic form."""

    group: DiscGroup
    elements: list[DiscElt]
    label: str = "D"

    @cached_property
    def index_of(self) -> dict[tuple, int]:
        return {m.coords: i for i, m in enumerate(self.elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def level(self) -> int:
        return self.group.level

    @cached_property
    def q(self) -> np.ndarray:
        if len(self.elements) == self.group.size:
            return self.group.q_table
        return np.array([self.group.q_num(m) for m in self.elements], dtype=np.int64)

    @cached_property
    def b(self) -> np.ndarray:
        if len(self.elements) == self.group.size:
            return self.group.b_table
        X = np.array([m.coords for m in self.elements], dtype=np.int64)
        bg = np.array(self.group._b, dtype=np.int64)
        return (X @ bg @ X.T) % self.level

    def mult_perm(self, k: int) -> list[int]:
        """Index of k*mu for each mu."""
        return [self.index_of[(k * m).coords] for m in self.elements]

    @cached_property
    def gauss_sum(self) -> CycNum:
        if len(self.elements) == self.group.size:
            return milgram_sum(self.group)
        total = CycNum.rational(0)
        vals, counts = np.unique(self.q, return_counts=True)
        for v, c in zip(vals, counts):
            total = total + int(c) * root_of_unity(int(v), self.level)
        return total

    @cached_property
    def s_prefactor(self) -> Fraction:
        """e(-sgn/8)/sqrt|D| = 1/(Gauss sum); rational for the modules at hand."""
        g = self.gauss_sum
        if not g.is_rational():
            raise ValueError("Gauss sum is not rational; S-prefactor needs a larger field")
        return 1 / g.as_rational()

    @cached_property
    def rho_S(self) -> "CycMatrix":
        return CycMatrix.from_exponents(self.level, -self.b, scale=self.s_prefactor)


def full_module(D: DiscGroup) -> QuadModule:
    """The module of all of D (cached on the group)."""
    mod = D.__dict__.get("_full_module")
    if mod is None:
        mod = QuadModule(D, D.elements(), "D")
        D.__dict__["_full_module"] = mod
    return mod


def p_module(D: DiscGroup, p: int) -> QuadModule:
    return QuadModule(D, D.p_part(p), f"D_{p}")


def rho_T(mod: QuadModule | DiscGroup) -> CycMatrix:
    mod = _mod(mod)
    n = mod.size
    exps = np.zeros((n, n), dtype=np.int64)
    exps[np.arange(n), np.arange(n)] = mod.q
    return CycMatrix.from_exponents(mod.level, exps, mask=np.eye(n, dtype=np.int64))


def rho_S(mod: QuadModule | DiscGroup) -> CycMatrix:
    return _mod(mod).rho_S


def _mod(x) -> QuadModule:
    return full_module(x) if isinstance(x, DiscGroup) else x



# ---------------------------------------------------------------------------
# SL2(Z) words

S_MAT = ((0, -1), (1, 0))


def _mul2(A, B):
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def check_sl2(M) -> tuple[tuple[int, int], tuple[int, int]]:
    try:
        (a, b), (c, d) = M
    except (TypeError, ValueError):
        raise ValueError("expected a 2x2 matrix") from None
    for x in (a, b, c, d):
        if int(x) != x:
            raise ValueError("matrix entries must be integers")
    a, b, c, d = int(a), int(b), int(c), int(d)
    if a * d - b * c != 1:
        raise ValueError(f"determinant is {a * d - b * c}, not 1")
    return (a, b), (c, d)


@dataclass(frozen=True)
class SL2Word:
    tokens: tuple  # ("S",) or ("T", k)
    target: tuple

    def evaluate(self):
        out = ((1, 0), (0, 1))
        for tok in self.tokens:
            out = _mul2(out, S_MAT if tok[0] == "S" else ((1, tok[1]), (0, 1)))
        return out

    def __str__(self):
        return " ".join("S" if t[0] == "S" else f"T^{t[1]}" for t in self.tokens) or "1"


def word_decompose(M) -> SL2Word:
    """Write M as a product of T^k and S by Euclid on the first column.

    Nearest-integer quotients halve |c| at every step, so the word has
    O(log max|entry|) letters.
    """
    target = check_sl2(M)
    (a, b), (c, d) = target
    tokens: list = []
    while c != 0:
        q = round(Fraction(a, c))
        if q:
            tokens.append(("T", q))
        a, b = a - q * c, b - q * d
        tokens.append(("S",))
        a, b, c, d = c, d, -a, -b
    # now a = d = +-1 and the remainder is +-T^{b/a}
    if a == -1:
        tokens += [("S",), ("S",)]  # -I = S^2
        b = -b
    if b:
        tokens.append(("T", b))
    w = SL2Word(tuple(tokens), target)
    if w.evaluate() != target:
        raise AssertionError(f"word {w} does not evaluate to {target}")
    return w


def rho(M, mod: QuadModule | DiscGroup, word: SL2Word | None = None) -> CycMatrix:
    """rho_D(M) as the product of generator matrices along a word for M."""
    mod = _mod(mod)
    word = word or word_decompose(M)
    S = rho_S(mod)
    out = CycMatrix.identity(mod.size, mod.level)
    for tok in word.tokens:
        out = out @ S if tok[0] == "S" else out.scale_columns_by_roots(tok[1] * mod.q)
    return out


def rho_apply(M, mod: QuadModule | DiscGroup, vec: CycMatrix, word: SL2Word | None = None) -> CycMatrix:
    """rho_D(M) vec without forming rho_D(M)."""
    mod = _mod(mod)
    word = word or word_decompose(M)
    S = rho_S(mod)
    out = vec
    for tok in reversed(word.tokens):
        out = S @ out if tok[0] == "S" else out.scale_rows_by_roots(tok[1] * mod.q)
    return out


def in_gamma0(M, N: int) -> bool:
    return check_sl2(M)[1][0] % N == 0


def gamma0_closed_form(M, mod: QuadModule | DiscGroup) -> CycMatrix:
    """rho(M) e_mu = e(bd Q_D(mu)) e_{d mu} for M in Gamma_0(N)."""
    mod = _mod(mod)
    (a, b), (c, d) = check_sl2(M)
    if c % mod.group.N:
        raise ValueError("matrix is not in Gamma_0(N)")
    n = mod.size
    perm = mod.mult_perm(d)
    exps = np.zeros((n, n), dtype=np.int64)
    mask = np.zeros((n, n), dtype=np.int64)
    exps[perm, np.arange(n)] = b * d * mod.q
    mask[perm, np.arange(n)] = 1
    return CycMatrix.from_exponents(mod.level, exps, mask=mask)


def random_gamma0(N: int, rng: random.Random, bound: int = 10**4):
    """A pseudorandom element of Gamma_0(N) with entries bounded by ``bound``."""
    while True:
        c = N * rng.randint(-(bound // N), bound // N)
        d = rng.randint(-bound, bound)
        if gcd(c, d) != 1:
            continue
        if c == 0:
            return ((d, rng.randint(-bound, bound)), (0, d))
        g, s, t = xgcd(d, c)  # s d + t c = 1
        a, b = s, -t
        k = -(a // c) if c > 0 else (-a) // (-c)
        a, b = a + k * c, b + k * d
        if max(abs(a), abs(b), abs(c), abs(d)) <= bound:
            return ((a, b), (c, d))


# ---------------------------------------------------------------------------
# relations


def negation_permutation(mod: QuadModule | DiscGroup) -> CycMatrix:
    mod = _mod(mod)
    return CycMatrix.permutation(mod.mult_perm(-1), mod.level)


def relation_report(mod: QuadModule | DiscGroup) -> dict:
    mod = _mod(mod)
    S, T = rho_S(mod), rho_T(mod)
    I = CycMatrix.identity(mod.size, mod.level)
    S2 = S @ S
    ST = S @ T
    return {
        "S2_is_negation": S2 == negation_permutation(mod),
        "ST3_equals_S2": ST @ ST @ ST == S2,
        "S_unitary": S @ S.conjugate_transpose() == I,
        "T_unitary": T @ T.conjugate_transpose() == I,
    }


# ---------------------------------------------------------------------------
# tensor factorisation over the p-parts (used for large |D|)


class SplitWeil:
    """rho_D = tensor product of rho_{D_p}, p | N, verified on the generators."""

    def __init__(self, D: DiscGroup):
        self.D = D
        self.primes = prime_factors(D.N)
        self.parts = [p_module(D, p) for p in self.primes]
        full = full_module(D)
        N = D.N
        idem = []
        for p in self.primes:
            m = N // p
            idem.append(m * pow(m, -1, p) % N)  # 1 mod p, 0 mod N/p
        comp = []
        for mu in full.elements:
            comp.append(tuple(part.index_of[(e * mu).coords] for e, part in zip(idem, self.parts)))
        self.components = np.array(comp, dtype=np.int64).reshape(full.size, len(self.parts))
        self.full = full

    def verify_generators(self) -> dict:
        """Exact check that rho_D(T), rho_D(S) are the tensor products of the local ones."""
        L = self.D.level
        q_sum = np.zeros(self.full.size, dtype=np.int64)
        b_sum = np.zeros((self.full.size, self.full.size), dtype=np.int64)
        pref = Fraction(1)
        for k, part in enumerate(self.parts):
            idx = self.components[:, k]
            q_sum += part.q[idx]
            b_sum += part.b[np.ix_(idx, idx)]
            pref *= part.s_prefactor
        return {
            "T": bool(np.array_equal(q_sum % L, self.full.q)),
            "S_phase": bool(np.array_equal(b_sum % L, self.full.b)),
            "S_prefactor": pref == self.full.s_prefactor,
            "split": len(set(map(tuple, self.components.tolist()))) == self.full.size,
        }

    def monomial_rho(self, M) -> tuple[list[int], list[int]] | None:
        """rho_D(M) as (perm, exps) if every local factor is monomial, else None."""
        word = word_decompose(M)
        local = []
        for part in self.parts:
            mf = rho(M, part, word).monomial_form()
            if mf is None:
                return None
            local.append(mf)
        sizes = [part.size for part in self.parts]
        lookup = {tuple(row): i for i, row in enumerate(self.components.tolist())}
        perm, exps = [], []
        for j in range(self.full.size):
            comp = self.components[j]
            target = tuple(local[k][0][comp[k]] for k in range(len(sizes)))
            perm.append(lookup[target])
            exps.append(sum(local[k][1][comp[k]] for k in range(len(sizes))) % self.D.level)
        return perm, exps


def closed_form_monomial(M, mod: QuadModule | DiscGroup) -> tuple[list[int], list[int]]:
    mod = _mod(mod)
    (a, b), (c, d) = check_sl2(M)
    return mod.mult_perm(d), [int(x) for x in (b * d * mod.q) % mod.level]


def gamma0_check(M, D: DiscGroup, split: SplitWeil | None = None) -> bool:
    """Word product equals the closed form for M in Gamma_0(N), entry for entry."""
    if split is None:
        return rho(M, D) == gamma0_closed_form(M, D)
    got = split.monomial_rho(M)
    return got is not None and got == closed_form_monomial(M, split.full)


def weil_json(M: CycMatrix) -> dict:
    return {"level": M.level, "shape": list(M.shape), "entries": M.to_json()}
