"""Exact arithmetic in Z[tau], where tau is the positive root of x^4 - x^2 - 1.

Every tile vertex produced by this package has coordinates in Z[tau], so
vertex identification is done with exact equality instead of epsilons.
Floats only appear when something is measured or drawn.

Elements are stored as four integer coefficients of 1, tau, tau^2, tau^3;
products are reduced with tau^4 = tau^2 + 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "TAU",
    "GoldenInt",
    "GoldenPoint",
    "Similarity",
    "Polygon",
    "ONE",
    "ZERO",
    "TAU_G",
    "S",
    "golden_mul",
    "to_float",
    "compose",
    "invert",
    "apply",
    "golden_bee",
    "polygon_area",
    "F1",
    "F2",
    "IDENTITY",
    "f_word",
    "f_minus_word",
    "scaling",
]

#: tau = sqrt(golden ratio), the positive real root of x^4 - x^2 - 1.
TAU = math.sqrt((1.0 + math.sqrt(5.0)) / 2.0)
_TAU_POWERS = (1.0, TAU, TAU * TAU, TAU * TAU * TAU)

Coeffs = tuple  # (c0, c1, c2, c3)


def _mul(a: Coeffs, b: Coeffs) -> Coeffs:
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    c0 = a0 * b0
    c1 = a0 * b1 + a1 * b0
    c2 = a0 * b2 + a1 * b1 + a2 * b0
    c3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
    c4 = a1 * b3 + a2 * b2 + a3 * b1
    c5 = a2 * b3 + a3 * b2
    c6 = a3 * b3
    # tau^4 = tau^2 + 1, tau^5 = tau^3 + tau, tau^6 = 2 tau^2 + 1
    return (c0 + c4 + c6, c1 + c5, c2 + c4 + 2 * c6, c3 + c5)


def _add(a: Coeffs, b: Coeffs) -> Coeffs:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def _sub(a: Coeffs, b: Coeffs) -> Coeffs:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])


def _neg(a: Coeffs) -> Coeffs:
    return (-a[0], -a[1], -a[2], -a[3])


def _float(a: Coeffs) -> float:
    return a[0] + a[1] * _TAU_POWERS[1] + a[2] * _TAU_POWERS[2] + a[3] * _TAU_POWERS[3]


def _sign_sqrt5(x: int, y: int) -> int:
    """Exact sign of x + y*sqrt(5)."""
    if x >= 0 and y >= 0:
        return 1 if (x or y) else 0
    if x <= 0 and y <= 0:
        return -1
    # opposite signs; x^2 == 5 y^2 is impossible unless both vanish
    if x * x > 5 * y * y:
        return 1 if x > 0 else -1
    return 1 if y > 0 else -1


def _sign(a: Coeffs) -> int:
    """Exact sign of a0 + a1 tau + a2 tau^2 + a3 tau^3.

    Write the value as (P + tau Q) / 2 with P, Q in Z[sqrt5] and compare
    P^2 against tau^2 Q^2 = phi Q^2 when the two parts disagree in sign.
    """
    a0, a1, a2, a3 = a
    px, py = 2 * a0 + a2, a2
    qx, qy = 2 * a1 + a3, a3
    sp = _sign_sqrt5(px, py)
    sq = _sign_sqrt5(qx, qy)
    if sq == 0 or sp == sq:
        return sp
    if sp == 0:
        return sq
    # Q^2 = m + n sqrt5
    m = qx * qx + 5 * qy * qy
    n = 2 * qx * qy
    dx = 2 * (px * px + 5 * py * py) - (m + 5 * n)
    dy = 4 * px * py - (m + n)
    return sp if _sign_sqrt5(dx, dy) > 0 else sq


class GoldenInt:
    """An element c0 + c1 tau + c2 tau^2 + c3 tau^3 of Z[tau]."""

    __slots__ = ("c",)

    def __init__(self, c0: int = 0, c1: int = 0, c2: int = 0, c3: int = 0) -> None:
        for v in (c0, c1, c2, c3):
            if not isinstance(v, int):
                raise TypeError(f"coefficients must be integers, got {v!r}")
        object.__setattr__(self, "c", (c0, c1, c2, c3))

    def __setattr__(self, name, value):
        raise AttributeError("GoldenInt is immutable")

    @classmethod
    def _from(cls, c: Coeffs) -> GoldenInt:
        g = object.__new__(cls)
        object.__setattr__(g, "c", c)
        return g

    @classmethod
    def coerce(cls, x: int | GoldenInt) -> GoldenInt:
        if isinstance(x, GoldenInt):
            return x
        if isinstance(x, int):
            return cls(x)
        raise TypeError(f"cannot coerce {x!r} to GoldenInt")

    @property
    def c0(self) -> int:
        return self.c[0]

    @property
    def c1(self) -> int:
        return self.c[1]

    @property
    def c2(self) -> int:
        return self.c[2]

    @property
    def c3(self) -> int:
        return self.c[3]

    def __repr__(self) -> str:
        return "GoldenInt(%d, %d, %d, %d)" % self.c

    def __str__(self) -> str:
        terms = []
        for k, v in enumerate(self.c):
            if v:
                terms.append(f"{v}" if k == 0 else f"{v}*tau^{k}")
        return " + ".join(terms) if terms else "0"

    def __eq__(self, other) -> bool:
        if isinstance(other, GoldenInt):
            return self.c == other.c
        if isinstance(other, int):
            return self.c == (other, 0, 0, 0)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.c)

    def __add__(self, other):
        if isinstance(other, int):
            other = GoldenInt(other)
        if not isinstance(other, GoldenInt):
            return NotImplemented
        return GoldenInt._from(_add(self.c, other.c))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = GoldenInt(other)
        if not isinstance(other, GoldenInt):
            return NotImplemented
        return GoldenInt._from(_sub(self.c, other.c))

    def __rsub__(self, other):
        return GoldenInt.coerce(other) - self

    def __neg__(self) -> GoldenInt:
        return GoldenInt._from(_neg(self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            return GoldenInt._from(tuple(other * v for v in self.c))
        if not isinstance(other, GoldenInt):
            return NotImplemented
        return GoldenInt._from(_mul(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> GoldenInt:
        if n < 0:
            return self.unit_inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __float__(self) -> float:
        return _float(self.c)

    def sign(self) -> int:
        """Exact sign (-1, 0 or 1) of the real number this element denotes."""
        return _sign(self.c)

    def __lt__(self, other) -> bool:
        return (self - GoldenInt.coerce(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - GoldenInt.coerce(other)).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - GoldenInt.coerce(other)).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - GoldenInt.coerce(other)).sign() >= 0

    def __bool__(self) -> bool:
        return any(self.c)

    def unit_inverse(self) -> GoldenInt:
        """Inverse of a unit of the form +-tau^k; raises for anything else."""
        v = _float(self.c)
        if v == 0.0:
            raise ZeroDivisionError("zero has no inverse")
        k = round(math.log(abs(v)) / math.log(TAU))
        cand = _pow_tau(-k)
        if v < 0:
            cand = -cand
        if self * cand != ONE:
            raise ValueError(f"{self!r} is not a unit of the form +-tau^k")
        return cand


def _pow_tau(k: int) -> GoldenInt:
    base = TAU_G if k >= 0 else S
    out = ONE
    for _ in range(abs(k)):
        out = out * base
    return out


ZERO = GoldenInt(0)
ONE = GoldenInt(1)
TAU_G = GoldenInt(0, 1, 0, 0)
#: s = 1/tau = tau^3 - tau
S = GoldenInt(0, -1, 0, 1)


def golden_mul(a: GoldenInt, b: GoldenInt) -> GoldenInt:
    return a * b


def to_float(a: GoldenInt) -> float:
    return _float(a.c)


class GoldenPoint(NamedTuple):
    x: GoldenInt
    y: GoldenInt

    def to_float(self) -> tuple[float, float]:
        return (_float(self.x.c), _float(self.y.c))

    def key(self) -> tuple:
        """Hashable exact key (8 integers)."""
        return self.x.c + self.y.c

    @classmethod
    def from_key(cls, key: Sequence[int]) -> GoldenPoint:
        return cls(GoldenInt(*key[:4]), GoldenInt(*key[4:]))

    @classmethod
    def of(cls, x: int | GoldenInt, y: int | GoldenInt) -> GoldenPoint:
        return cls(GoldenInt.coerce(x), GoldenInt.coerce(y))


Polygon = tuple  # tuple[GoldenPoint, ...], counter-clockwise


@dataclass(frozen=True)
class Similarity:
    """x -> M x + t with M a scaled orthogonal matrix and entries in Z[tau]."""

    m00: GoldenInt
    m01: GoldenInt
    m10: GoldenInt
    m11: GoldenInt
    tx: GoldenInt
    ty: GoldenInt

    def __post_init__(self):
        a, b, c, d = self.m00, self.m01, self.m10, self.m11
        rotation = a == d and b == -c
        reflection = a == -d and b == c
        if not (rotation or reflection):
            raise ValueError("matrix is not a scaled isometry")
        if a.c == (0, 0, 0, 0) and b.c == (0, 0, 0, 0):
            raise ValueError("degenerate similarity")

    def __matmul__(self, other: Similarity) -> Similarity:
        return compose(self, other)

    def __call__(self, p: GoldenPoint) -> GoldenPoint:
        return apply(self, p)

    def det(self) -> GoldenInt:
        return self.m00 * self.m11 - self.m01 * self.m10

    def is_reflection(self) -> bool:
        return self.det().sign() < 0

    def scale_exponent(self) -> int:
        """k such that the scaling ratio is tau^k."""
        r2 = self.m00 * self.m00 + self.m01 * self.m01
        k2 = round(math.log(float(r2)) / math.log(TAU))
        if r2 != _pow_tau(k2):
            raise ValueError("scaling ratio is not a power of tau")
        return k2 // 2

    def as_tuple(self) -> tuple:
        return (self.m00.c, self.m01.c, self.m10.c, self.m11.c, self.tx.c, self.ty.c)

    def to_float(self) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
        return ((float(self.m00), float(self.m01)), (float(self.m10), float(self.m11)),
                (float(self.tx), float(self.ty)))


def compose(f: Similarity, g: Similarity) -> Similarity:
    """f o g (apply g first)."""
    return Similarity(
        f.m00 * g.m00 + f.m01 * g.m10,
        f.m00 * g.m01 + f.m01 * g.m11,
        f.m10 * g.m00 + f.m11 * g.m10,
        f.m10 * g.m01 + f.m11 * g.m11,
        f.m00 * g.tx + f.m01 * g.ty + f.tx,
        f.m10 * g.tx + f.m11 * g.ty + f.ty,
    )


def invert(f: Similarity) -> Similarity:
    # M^-1 = M^T / r^2 for a scaled orthogonal M
    r2 = f.m00 * f.m00 + f.m01 * f.m01
    inv = r2.unit_inverse()
    a, b, c, d = f.m00 * inv, f.m10 * inv, f.m01 * inv, f.m11 * inv
    return Similarity(a, b, c, d, -(a * f.tx + b * f.ty), -(c * f.tx + d * f.ty))


def apply(f: Similarity, p: GoldenPoint) -> GoldenPoint:
    x, y = p.x.c, p.y.c
    return GoldenPoint(
        GoldenInt._from(_add(_add(_mul(f.m00.c, x), _mul(f.m01.c, y)), f.tx.c)),
        GoldenInt._from(_add(_add(_mul(f.m10.c, x), _mul(f.m11.c, y)), f.ty.c)),
    )


IDENTITY = Similarity(ONE, ZERO, ZERO, ONE, ZERO, ZERO)

_S2 = S * S
F1 = Similarity(ZERO, -S, S, ZERO, S, ZERO)
F2 = Similarity(_S2, ZERO, ZERO, -_S2, ZERO, ONE)
_F_INV = {1: invert(F1), 2: invert(F2)}
_F = {1: F1, 2: F2}


def scaling(k: int) -> Similarity:
    """Homothety x -> tau^k x about the origin."""
    r = _pow_tau(k)
    return Similarity(r, ZERO, ZERO, r, ZERO, ZERO)


def f_word(sigma: Iterable[int]) -> Similarity:
    """f_{s1} o f_{s2} o ... o f_{sk}; the identity for the empty word."""
    return reduce(compose, (_F[int(c)] for c in sigma), IDENTITY)


def f_minus_word(sigma: Iterable[int]) -> Similarity:
    """f_{s1}^-1 o f_{s2}^-1 o ... o f_{sk}^-1 (inverses in the same order).

    Note this is the inverse of ``f_word(reversed(sigma))``, not of
    ``f_word(sigma)``.
    """
    return reduce(compose, (_F_INV[int(c)] for c in sigma), IDENTITY)


def golden_bee() -> Polygon:
    """The L-shaped hexagon G with G = f1(G) u f2(G), counter-clockwise."""
    s, s2, s3 = S, _S2, S * _S2
    return (
        GoldenPoint(ZERO, ZERO),
        GoldenPoint(s, ZERO),
        GoldenPoint(s, s2),
        GoldenPoint(s3, s2),
        GoldenPoint(s3, ONE),
        GoldenPoint(ZERO, ONE),
    )


def polygon_area(poly: Sequence[GoldenPoint]) -> GoldenInt:
    """Exact signed area (positive for counter-clockwise order)."""
    total = ZERO
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        total = total + p.x * q.y - q.x * p.y
    # area = total / 2; the shoelace sum of a lattice in Z[tau] may be odd,
    # so halve coefficient-wise only when exact.
    if any(v % 2 for v in total.c):
        raise ValueError("area is not in Z[tau]")
    return GoldenInt(*(v // 2 for v in total.c))
