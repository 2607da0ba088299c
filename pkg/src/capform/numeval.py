"""Floating-point evaluation: K_{ir}, W_{0,ir/2}, and truncated lift sums.

K_{ir}(x) = int_0^oo exp(-x cosh t) cos(r t) dt. The integrand is entire and
even in t and decays doubly exponentially, so the trapezoid rule on [0, T]
converges geometrically in 1/h. T is chosen so that x (cosh T - 1) = 700,
which bounds the dropped tail by e^-700 relative to the leading term e^-x.
The step is halved until two successive sums agree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .discform import DiscGroup
from .exactcore import rat
from .orders import DualVector, Order
from .thetacoeff import A_closed_form
from .vvlift import MaassDatum

TRUNCATION = 700.0
REL_TOL = 1e-12
MAX_HALVINGS = 12


class QuadratureError(ArithmeticError):
    pass


class MissingCoefficient(KeyError):
    pass


def _cutoff(x_min: float) -> float:
    return math.acosh(1.0 + TRUNCATION / x_min)


def _k_trapezoid(r: float, xs: np.ndarray, h: float, T: float) -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(0.0, T + h, h)
    w = np.full(t.shape, h)
    w[0] = h / 2
    # exp(-x (cosh t - 1)) keeps the sums O(1); the factor e^-x is restored after
    E = np.exp(-np.outer(xs, np.cosh(t) - 1.0))
    return (E @ (w * np.cos(r * t))) * np.exp(-xs), E @ w * np.exp(-xs)


def bessel_K_imag_vec(r: float, xs) -> np.ndarray:
    """K_{ir}(x) for an array of positive x."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(~(xs > 0)):
        raise ValueError("K_{ir}(x) needs x > 0")
    T = _cutoff(float(xs.min()))
    h = 0.5
    prev, _ = _k_trapezoid(r, xs, h, T)
    for _ in range(MAX_HALVINGS):
        h /= 2
        cur, scale = _k_trapezoid(r, xs, h, T)
        # relative to K_0(x), which bounds |K_{ir}(x)| and is never near zero
        if np.all(np.abs(cur - prev) <= REL_TOL * scale):
            return cur
        prev = cur
    raise QuadratureError(f"K_(i{r}) did not converge")


def bessel_K_imag(r: float, x: float) -> float:
    return float(bessel_K_imag_vec(r, [x])[0])


def whittaker_W0(r: float, z) -> np.ndarray | float:
    """W_{0, ir/2}(z) = sqrt(z / pi) K_{ir/2}(z / 2)."""
    zs = np.asarray(z, dtype=float)
    out = np.sqrt(zs / math.pi) * bessel_K_imag_vec(r / 2, np.atleast_1d(zs) / 2).reshape(zs.shape)
    return float(out) if out.ndim == 0 else out


def _laplace_lhs(a: float, p: float, r: float, h: float) -> float:
    # t = e^u; both ends of the u-range leave integrands below e^-350
    lo, hi = math.log(a / 750.0), math.log(750.0 / p)
    u = np.arange(lo, hi + h, h)
    t = np.exp(u)
    z = a / t
    g = np.exp(-p * t - z / 2) * whittaker_W0(r, z) * t
    return float(h * (g.sum() - (g[0] + g[-1]) / 2))


def laplace_identity_check(a: float, p: float, r: float) -> float:
    """Relative error of int_0^oo e^(-pt - a/2t) W_{0,ir/2}(a/t) dt = 2 sqrt(a/p) K_{ir}(2 sqrt(ap))."""
    if a <= 0 or p <= 0:
        raise ValueError("a and p must be positive")
    rhs = 2 * math.sqrt(a / p) * bessel_K_imag(r, 2 * math.sqrt(a * p))
    h = 0.25
    prev = _laplace_lhs(a, p, r, h)
    for _ in range(MAX_HALVINGS):
        h /= 2
        cur = _laplace_lhs(a, p, r, h)
        if abs(cur - prev) <= 1e-10 * abs(cur):
            return abs(cur - rhs) / abs(rhs)
        prev = cur
    raise QuadratureError("Laplace integral did not converge")


# ---------------------------------------------------------------- lift


@dataclass(frozen=True)
class NumericMaass:
    level: int
    al_signs: Mapping[int, int]
    r: float
    coeffs: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        coeffs = {int(n): float(c) for n, c in dict(self.coeffs).items()}
        if not coeffs or max(abs(n) for n in coeffs) < 1:
            raise ValueError("need coefficients c(n) for some n != 0")
        if 0 in coeffs:
            raise ValueError("c(0) is not part of a cusp form")
        if not all(math.isfinite(c) for c in coeffs.values()):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "al_signs", {int(p): int(s) for p, s in dict(self.al_signs).items()})

    def datum(self) -> MaassDatum:
        return MaassDatum(self.level, self.al_signs, self.r)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "al_signs": {str(p): s for p, s in sorted(self.al_signs.items())},
            "r": self.r,
            "coeffs": {str(n): c for n, c in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, obj) -> "NumericMaass":
        return cls(int(obj["level"]), obj.get("al_signs", {}), obj["r"], obj["coeffs"])

    @classmethod
    def load(cls, path) -> "NumericMaass":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class EvalPoint:
    x: tuple[float, float, float, float]
    y: float

    def __post_init__(self):
        if len(self.x) != 4:
            raise ValueError("x must have 4 coordinates")
        if not self.y > 0:
            raise ValueError("y must be positive")
        object.__setattr__(self, "x", tuple(float(t) for t in self.x))

    @classmethod
    def parse(cls, text: str) -> "EvalPoint":
        """``"x1,x2,x3,x4;y"``."""
        xs, sep, y = text.partition(";")
        if not sep:
            raise ValueError(f"malformed point {text!r}; expected x1,x2,x3,x4;y")
        return cls(tuple(float(t) for t in xs.split(",")), float(y))


def _positive_rep(v: DualVector) -> bool:
    for c in v.coords:
        if c:
            return c > 0
    return False


def _numeric_A(beta: DualVector, maass: NumericMaass, datum: MaassDatum, D: DiscGroup) -> float:
    s = A_closed_form(beta, datum, D)
    try:
        return s.evaluate(maass.coeffs)
    except KeyError as exc:
        raise MissingCoefficient(f"c({exc.args[0]}) is needed for beta = {beta.coords}") from None


def evaluate_lift(order: Order | DiscGroup, maass: NumericMaass, pt: EvalPoint, q_max, fold: bool = True) -> dict:
    """Truncated Fourier sum over beta != 0 with Q(beta) <= q_max.

    With ``fold`` the pair beta, -beta contributes 2 A(beta) cos(2 pi beta.x).
    """
    D = order if isinstance(order, DiscGroup) else DiscGroup(order)
    q_max = rat(q_max)
    if q_max <= 0:
        raise ValueError("q_max must be positive")
    if maass.level != D.N:
        raise ValueError(f"coefficients are for level {maass.level}, the order has level {D.N}")
    datum = maass.datum()
    x = np.array(pt.x)
    y = pt.y
    vecs = D.dual.short_vectors(2 * q_max)
    inside = [(b, q) for b, q in vecs if q <= q_max]
    shell = [(b, q) for b, q in vecs if q > q_max]
    qs = sorted({q for _, q in vecs})
    K = dict(zip(qs, bessel_K_imag_vec(maass.r, [4 * math.pi * math.sqrt(q) * y for q in qs])))
    total = 0.0
    for b, q in inside:
        if fold and not _positive_rep(b):
            continue
        phase = 2 * math.pi * float(np.dot(b.coords, x))
        trig = 2 * math.cos(phase) if fold else math.cos(phase)
        total += _numeric_A(b, maass, datum, D) * y * y * K[q] * trig
    # size of the next shell with every coefficient replaced by the largest one given
    cmax = max(abs(c) for c in maass.coeffs.values())
    tail = 0.0
    for b, q in shell:
        s = A_closed_form(b, datum, D)
        weight = sum(abs(float(a)) for a in s.terms.values())
        k0 = math.sqrt(math.pi / (8 * math.pi * math.sqrt(q) * y)) * math.exp(-4 * math.pi * math.sqrt(q) * y)
        tail += math.sqrt(q) * weight * cmax * y * y * k0
    return {"value": total, "terms": len(inside), "q_max": str(q_max), "tail_estimate": tail}


def hand_sum(D: DiscGroup, maass: NumericMaass, pt: EvalPoint, q_max) -> complex:
    """Unfolded complex sum, assembled independently of ``evaluate_lift``."""
    datum = maass.datum()
    total = 0j
    for b, q in D.dual.short_vectors(q_max):
        A = _numeric_A(b, maass, datum, D)
        k = bessel_K_imag(maass.r, 4 * math.pi * math.sqrt(q) * pt.y)
        phase = 2 * math.pi * sum(c * t for c, t in zip(b.coords, pt.x))
        total += A * pt.y**2 * k * complex(math.cos(phase), math.sin(phase))
    return total


def periodicity_check(D: DiscGroup, maass: NumericMaass, pt: EvalPoint, q_max, shifts: Sequence[Sequence[int]]) -> float:
    """Largest |F(x + v) - F(x)| over integer shifts v."""
    base = evaluate_lift(D, maass, pt, q_max)["value"]
    worst = 0.0
    for v in shifts:
        moved = EvalPoint(tuple(a + b for a, b in zip(pt.x, v)), pt.y)
        worst = max(worst, abs(evaluate_lift(D, maass, moved, q_max)["value"] - base))
    return worst
