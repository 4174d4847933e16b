"""Local and global heights on the affine chart of the blow-up.

A rational point x = a/b (primitive: gcd(content(a), b) = 1) has, at a
finite place p,

    H_{D1,p}(x)^-1 = max(1/M_p, |f(x)|_p / M_p^d),   M_p = max(1, |x|_p),
    H_{D0,p}(x)    = M_p / H_{D1,p}(x),

and at the archimedean place the same formulas with each maximum
replaced by the root of the sum of squares.  Writing Q = b^2 + |a|^2,
F = f(a) and g = gcd(b, F) (g = b when F = 0), the finite parts collapse
to integers:

    prod_p M_p = b,     prod_p H_{D1,p} = g,

so every global quantity reduces to exact integer data plus one
archimedean factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polynomial import DimensionMismatch, HomogeneousPolynomial

INFINITE_PLACE = "inf"


def _vp(m: int, p: int) -> int:
    if m == 0:
        raise ValueError("valuation of zero")
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


@dataclass(frozen=True)
class RationalPoint:
    """Point of Q^n in canonical primitive form a/b, b > 0."""

    a: tuple[int, ...]
    b: int

    @staticmethod
    def make(a: Sequence[int], b: int = 1) -> "RationalPoint":
        if b == 0:
            raise ValueError("denominator must be nonzero")
        a = tuple(int(v) for v in a)
        if b < 0:
            a = tuple(-v for v in a)
            b = -b
        g = math.gcd(b, *(abs(v) for v in a)) if a else b
        if g > 1:
            a = tuple(v // g for v in a)
            b //= g
        return RationalPoint(a=a, b=b)

    @staticmethod
    def from_fractions(xs: Sequence) -> "RationalPoint":
        fr = [Fraction(x) for x in xs]
        b = math.lcm(*(f.denominator for f in fr)) if fr else 1
        return RationalPoint.make([f.numerator * (b // f.denominator) for f in fr], b)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.a)

    def coordinates(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.b) for v in self.a)

    def norm_sq(self) -> Fraction:
        return Fraction(sum(v * v for v in self.a), self.b * self.b)


@dataclass(frozen=True)
class LocalHeightValue:
    """Pair (H_{D0,v}, H_{D1,v}); exact powers of p at finite places."""

    place: object  # prime int or INFINITE_PLACE
    h_d0: object  # Fraction at finite places, float at infinity
    h_d1: object


@dataclass(frozen=True)
class PicardParameter:
    s0: float
    s1: float

    @staticmethod
    def anticanonical(n: int) -> "PicardParameter":
        return PicardParameter(float(n + 1), float(n))


def padic_sup_norm(x: RationalPoint, p: int) -> Fraction:
    """max_i |x_i|_p as an exact rational; 0 for the origin."""
    if x.is_zero:
        return Fraction(0)
    vb = _vp(x.b, p)
    va = min(_vp(v, p) for v in x.a if v != 0)
    e = vb - va
    return Fraction(p) ** e


def _height_data(f: HomogeneousPolynomial, x: RationalPoint):
    """(Q, F, g) with Q = b^2 + |a|^2, F = f(a), g = gcd(b, F)."""
    if x.n != f.n:
        raise DimensionMismatch(f"point has n={x.n}, form has n={f.n}")
    Q = x.b * x.b + sum(v * v for v in x.a)
    F = f.evaluate(x.a)
    g = x.b if F == 0 else math.gcd(x.b, abs(F))
    return Q, F, g


def local_height(f: HomogeneousPolynomial, x: RationalPoint, v) -> LocalHeightValue:
    """Exact local height pair at a finite place, float pair at infinity."""
    if v == INFINITE_PLACE:
        Q, F, _ = _height_data(f, x)
        d = f.d
        # H_{D1,inf} = sqrt(Q^d / (b^2 Q^(d-1) + F^2)), all integers
        denom = x.b * x.b * Q ** (d - 1) + F * F
        h_d1 = math.sqrt(Fraction(Q**d, denom))
        h_d0 = math.sqrt(Fraction(denom, Q ** (d - 1))) / x.b
        return LocalHeightValue(place=INFINITE_PLACE, h_d0=h_d0, h_d1=h_d1)
    p = int(v)
    vb = _vp(x.b, p) if x.b % p == 0 else 0
    if vb == 0:
        return LocalHeightValue(place=p, h_d0=Fraction(1), h_d1=Fraction(1))
    F = f.evaluate(x.a)
    vF = _vp(F, p) if F != 0 else None
    m1 = vb if vF is None else min(vb, vF)
    return LocalHeightValue(place=p, h_d0=Fraction(p) ** (vb - m1), h_d1=Fraction(p) ** m1)


def finite_height_parts(f: HomogeneousPolynomial, x: RationalPoint):
    """(M_fin, H_D1_fin) = (b, gcd(b, f(a))) as exact integers."""
    _, _, g = _height_data(f, x)
    return x.b, g


def archimedean_height_parts(f: HomogeneousPolynomial, x: RationalPoint):
    """(M_inf, h_D1_inf) as floats."""
    Q, F, _ = _height_data(f, x)
    d = f.d
    denom = x.b * x.b * Q ** (d - 1) + F * F
    return math.sqrt(Q) / x.b, math.sqrt(Fraction(Q**d, denom))


def global_height(f: HomogeneousPolynomial, s: PicardParameter, x: RationalPoint) -> float:
    """H(s; x) = prod_v H_{D0,v}^s0 * H_{D1,v}^s1."""
    Q, F, g = _height_data(f, x)
    if Q == x.b * x.b and F == 0:  # origin
        return 1.0
    d = f.d
    # global M = sqrt(Q), global H_D1 = g * h_D1_inf
    log_m = 0.5 * math.log(Q)
    denom = x.b * x.b * Q ** (d - 1) + F * F
    log_h_d1 = math.log(g) + 0.5 * (d * _log_int(Q) - _log_int(denom))
    # H = M^s0 * H_D1^(s1 - s0)
    return math.exp(s.s0 * log_m + (s.s1 - s.s0) * log_h_d1)


def _log_int(m: int) -> float:
    """log of a (possibly huge) positive integer without float overflow."""
    if m.bit_length() <= 900:
        return math.log(m)
    k = m.bit_length() - 900
    return math.log(m >> k) + k * math.log(2)


def anticanonical_height_sq(f: HomogeneousPolynomial, x: RationalPoint) -> Fraction:
    """Exact H((n+1, n); x)^2 = Q^(n+1-d) (b^2 Q^(d-1) + F^2) / g^2.

    Valid for d <= n + 1; the general expression
    Q^(n+1) (b^2 Q^(d-1) + F^2) / (g^2 Q^d) is used otherwise.
    """
    Q, F, g = _height_data(f, x)
    core = x.b * x.b * Q ** (f.d - 1) + F * F
    if f.d <= f.n + 1:
        return Fraction(Q ** (f.n + 1 - f.d) * core, g * g)
    return Fraction(Q ** (f.n + 1) * core, g * g * Q**f.d)


def height_decomposition(f: HomogeneousPolynomial, x: RationalPoint):
    """(M_global, H_D1_global); H((n+1,n); x) = M^(n+1) / H_D1."""
    Q, F, g = _height_data(f, x)
    d = f.d
    denom = x.b * x.b * Q ** (d - 1) + F * F
    h_d1_inf = math.sqrt(Fraction(Q**d, denom))
    return math.sqrt(Q), g * h_d1_inf
