"""Gegenbauer and Jacobi polynomials with exact rational coefficients.

Both families are built straight from their finite series; no recurrence is
used here (recurrences serve as an independent check in the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numerics import RatLike, binomial, pochhammer, rat

ZERO_DEGREE = -1
"""Degree reported for the zero polynomial."""


@dataclass(frozen=True)
class PolyRat:
    """Univariate polynomial, coefficients ordered from degree 0 upwards."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence[RatLike] = ()) -> None:
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    def __call__(self, z):
        """Horner evaluation; exact for rationals, also works for floats/arrays."""
        acc = 0 * z if not isinstance(z, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + (c if isinstance(z, (int, Fraction)) else float(c))
        return acc

    def __add__(self, other: "PolyRat") -> "PolyRat":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return PolyRat([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "PolyRat") -> "PolyRat":
        return self + other.scale(-1)

    def __mul__(self, other: "PolyRat") -> "PolyRat":
        if not self.coeffs or not other.coeffs:
            return PolyRat()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyRat(out)

    def scale(self, c: RatLike) -> "PolyRat":
        c = rat(c)
        return PolyRat([c * a for a in self.coeffs])

    def compose_neg(self) -> "PolyRat":
        """``z -> p(-z)``."""
        return PolyRat([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)])

    def derivative(self) -> "PolyRat":
        return PolyRat([k * c for k, c in enumerate(self.coeffs)][1:])

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __repr__(self) -> str:
        return f"PolyRat({[str(c) for c in self.coeffs]})"


def _linear(c0: RatLike, c1: RatLike) -> PolyRat:
    return PolyRat([c0, c1])


def _power(p: PolyRat, k: int) -> PolyRat:
    out = PolyRat([1])
    for _ in range(k):
        out = out * p
    return out


def gegenbauer(m: int, lam: RatLike) -> PolyRat:
    r"""``C_m^lam(z) = sum_j (-1)^j (lam)_{m-j} / (j! (m-2j)!) (2z)^{m-2j}``."""
    if m < 0:
        raise ValueError("degree must be non-negative")
    lam = rat(lam)
    coeffs = [Fraction(0)] * (m + 1)
    for j in range(m // 2 + 1):
        k = m - 2 * j
        c = pochhammer(lam, m - j) / (math.factorial(j) * math.factorial(k))
        coeffs[k] = (-1) ** j * c * 2**k
    return PolyRat(coeffs)


def jacobi(m: int, a: RatLike, b: RatLike) -> PolyRat:
    r"""``P_m^{(a,b)}(z) = 2^{-m} sum_j C(m+a, j) C(m+b, m-j) (z-1)^{m-j} (z+1)^j``."""
    if m < 0:
        raise ValueError("degree must be non-negative")
    a, b = rat(a), rat(b)
    zm1, zp1 = _linear(-1, 1), _linear(1, 1)
    total = PolyRat()
    for j in range(m + 1):
        c = binomial(m + a, j) * binomial(m + b, m - j)
        if c:
            total = total + (_power(zm1, m - j) * _power(zp1, j)).scale(c)
    return total.scale(Fraction(1, 2**m))


def gegenbauer_value_at_zero(m: int, lam: RatLike) -> Fraction:
    """Closed form of ``C_m^lam(0)``: zero for odd ``m``."""
    if m % 2:
        return Fraction(0)
    k = m // 2
    return (-1) ** k * pochhammer(lam, k) / math.factorial(k)


__all__ = ["PolyRat", "ZERO_DEGREE", "gegenbauer", "gegenbauer_value_at_zero", "jacobi"]
