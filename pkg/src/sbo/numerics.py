"""Exact rational scalars, Pochhammer symbols and Gamma-function ratios.

Exact work is done over :class:`fractions.Fraction` (arbitrary precision,
always in lowest terms).  Floating-point Gamma values, needed only by the
quadrature oracle and by constants containing ``pi``, are thin wrappers over
:mod:`math` with explicit pole handling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Union

from .errors import NotBothPoles, NotRationalError, ParameterError, PoleError

Rat = Fraction
RatLike = Union[Fraction, int, str]

_RAT_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def rat(x: RatLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational.

    Floats are refused: an exact quantity must never silently inherit binary
    rounding.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_rat(text: str) -> Fraction:
    m = _RAT_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rat(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def is_nonpositive_integer(x: Fraction | int) -> bool:
    x = Fraction(x)
    return x.denominator == 1 and x <= 0


def pochhammer(x: RatLike, k: int) -> Fraction:
    """Rising factorial ``x (x+1) ... (x+k-1)``; the empty product for ``k = 0``."""
    if k < 0:
        raise ValueError("pochhammer needs k >= 0")
    x = rat(x)
    out = Fraction(1)
    for j in range(k):
        out *= x + j
        if not out:
            return out
    return out


def falling(x: RatLike, k: int) -> Fraction:
    """Falling factorial ``x (x-1) ... (x-k+1)``."""
    x = rat(x)
    out = Fraction(1)
    for j in range(k):
        out *= x - j
    return out


def binomial(x: RatLike, k: int) -> Fraction:
    """Generalized binomial ``C(x, k)`` for rational ``x`` and integer ``k``."""
    if k < 0:
        return Fraction(0)
    return falling(x, k) / math.factorial(k)


def gamma_ratio_shift(a: RatLike, m: int) -> Fraction:
    """Exact ``Gamma(a+m) / Gamma(a)`` for integer ``m``.

    Raises :class:`PoleError` whenever either Gamma value is singular, since
    the ratio of two poles is not determined by the shift alone.
    """
    a = rat(a)
    if is_nonpositive_integer(a) or is_nonpositive_integer(a + m):
        raise PoleError(f"Gamma pole on the shift path from {format_rat(a)} by {m}")
    if m >= 0:
        return pochhammer(a, m)
    return 1 / pochhammer(a + m, -m)


def gamma_ratio_limit(a0: RatLike, ca: RatLike, b0: RatLike, cb: RatLike) -> Fraction:
    """``lim_{eps->0} Gamma(a0 + ca*eps) / Gamma(b0 + cb*eps)`` for two simple poles.

    Uses the residue rule ``Gamma(-m + d) ~ (-1)^m / (m! d)``.
    """
    a0, ca, b0, cb = rat(a0), rat(ca), rat(b0), rat(cb)
    if ca == 0 or cb == 0:
        raise ValueError("ca and cb must be nonzero")
    pa, pb = is_nonpositive_integer(a0), is_nonpositive_integer(b0)
    if pa != pb:
        raise NotBothPoles(f"exactly one of {format_rat(a0)}, {format_rat(b0)} is a pole")
    if not pa:
        raise NotBothPoles("neither argument is a pole; use gamma_ratio_shift")
    ma, mb = int(-a0), int(-b0)
    sign = -1 if (ma - mb) % 2 else 1
    return sign * Fraction(math.factorial(mb), math.factorial(ma)) * cb / ca


@dataclass(frozen=True)
class GammaArg:
    """A Gamma argument ``base + slope * eps`` near ``eps = 0``."""

    base: Fraction
    slope: Fraction = Fraction(0)


def gamma_product_limit(num: Iterable[GammaArg], den: Iterable[GammaArg]) -> Fraction:
    """Exact limit of ``prod Gamma(num) / prod Gamma(den)`` as ``eps -> 0``.

    Each singular factor contributes a simple pole with the residue rule used
    in :func:`gamma_ratio_limit`.  Regular factors must pair off between the
    numerator and the denominator modulo integers (or sit at positive
    integers); otherwise the value is transcendental and
    :class:`NotRationalError` is raised.  More poles upstairs than downstairs
    is a :class:`PoleError`; fewer gives an exact zero.
    """
    order = 0
    coeff = Fraction(1)
    regular_num: list[Fraction] = []
    regular_den: list[Fraction] = []
    for arg, sign in [(g, 1) for g in num] + [(g, -1) for g in den]:
        if is_nonpositive_integer(arg.base):
            if arg.slope == 0:
                raise PoleError(f"unregularized Gamma pole at {format_rat(arg.base)}")
            m = int(-arg.base)
            res = Fraction((-1) ** m, math.factorial(m)) / arg.slope
            coeff = coeff * res if sign > 0 else coeff / res
            order += sign
        else:
            (regular_num if sign > 0 else regular_den).append(arg.base)
    if order > 0:
        raise PoleError("net pole in Gamma product")
    if order < 0:
        return Fraction(0)
    coeff *= _regular_gamma_ratio(regular_num, regular_den)
    return coeff


def _regular_gamma_ratio(num: list[Fraction], den: list[Fraction]) -> Fraction:
    num = list(num)
    den = list(den)
    out = Fraction(1)
    # positive integers are factorials
    for group, sgn in ((num, 1), (den, -1)):
        for x in [x for x in group if x.denominator == 1]:
            f = Fraction(math.factorial(int(x) - 1))
            out = out * f if sgn > 0 else out / f
            group.remove(x)
    # remaining non-integers must pair off modulo Z
    for x in list(num):
        partner = next((y for y in den if (x - y).denominator == 1), None)
        if partner is None:
            raise NotRationalError(f"unpaired Gamma({format_rat(x)}) is transcendental")
        out *= gamma_ratio_shift(partner, int(x - partner))
        num.remove(x)
        den.remove(partner)
    if den:
        raise NotRationalError(f"unpaired Gamma({format_rat(den[0])}) in denominator")
    return out


# ---------------------------------------------------------------------------
# floating point


def _is_pole_float(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma_float(x: float) -> float:
    """Gamma function in double precision; reflection for negative arguments.

    ``math.gamma`` already uses reflection internally; the wrapper only turns
    its domain errors at non-positive integers into :class:`PoleError`.
    """
    x = float(x)
    if _is_pole_float(x):
        raise PoleError(f"Gamma pole at {x}")
    return math.gamma(x)


def log_gamma_float(x: float) -> float:
    """``log|Gamma(x)|``."""
    x = float(x)
    if _is_pole_float(x):
        raise PoleError(f"Gamma pole at {x}")
    return math.lgamma(x)


def gamma_sign(x: float) -> int:
    """Sign of ``Gamma(x)`` for real non-pole ``x``."""
    x = float(x)
    if _is_pole_float(x):
        raise PoleError(f"Gamma pole at {x}")
    if x > 0:
        return 1
    return -1 if math.floor(x) % 2 else 1


def gamma_ratio_float(num: Iterable[float], den: Iterable[float]) -> float:
    """``prod Gamma(num) / prod Gamma(den)`` evaluated through log-Gamma."""
    log = 0.0
    sign = 1
    for x in num:
        log += log_gamma_float(x)
        sign *= gamma_sign(x)
    for x in den:
        if _is_pole_float(x):
            return 0.0
        log -= log_gamma_float(x)
        sign *= gamma_sign(x)
    return sign * math.exp(log)


@dataclass(frozen=True)
class ApproxReal:
    """A float carried together with the tolerance used to compare it."""

    value: float
    tol: float = 1e-12

    def close_to(self, other: float | "ApproxReal") -> bool:
        v = other.value if isinstance(other, ApproxReal) else float(other)
        scale = max(1.0, abs(self.value), abs(v))
        return abs(self.value - v) <= self.tol * scale

    def __float__(self) -> float:
        return self.value


def to_float(x: Fraction | int | float) -> float:
    return float(x)


def lcm_denominator(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (Fraction(v).denominator for v in values), 1)


__all__ = [
    "ApproxReal",
    "GammaArg",
    "ParameterError",
    "Rat",
    "binomial",
    "falling",
    "format_rat",
    "gamma_float",
    "gamma_product_limit",
    "gamma_ratio_float",
    "gamma_ratio_limit",
    "gamma_ratio_shift",
    "gamma_sign",
    "is_nonpositive_integer",
    "lcm_denominator",
    "log_gamma_float",
    "parse_rat",
    "pochhammer",
    "rat",
]
