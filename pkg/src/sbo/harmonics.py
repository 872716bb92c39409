"""Real and complex spherical harmonics built from branching embeddings.

Every element carries its homogeneous harmonic polynomial, so homogeneity,
harmonicity and the coordinate-multiplication identities can be checked
exactly; sphere evaluation goes through the (numba or numpy) kernels.

Real harmonics on ``R^n`` use variables ``(x_1, ..., x_n)``.  Complex
harmonics on ``C^n`` use ``(z_1..z_n, zbar_1..zbar_n)`` as independent
variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DegreeError, EmptySpace, ParityError
from .numerics import binomial, gamma_ratio_float
from .orthopoly import PolyRat, gegenbauer, jacobi
from .polynomial import (
    MPoly,
    laplacian_complex,
    laplacian_real,
    norm_squared_complex,
    norm_squared_real,
)


@dataclass(frozen=True, eq=False)
class HarmonicElement:
    n: int
    degree: int | tuple[int, int]
    path: tuple[str, ...]
    poly: MPoly = field(repr=False)
    is_complex: bool = False

    @property
    def label(self) -> str:
        return "/".join(self.path)

    def __call__(self, points, backend: str | None = None) -> np.ndarray:
        """Evaluate at an ``(m, n)`` array of sphere points (complex for ``C^n``)."""
        pts = np.atleast_2d(np.asarray(points))
        if self.is_complex:
            pts = np.concatenate([pts, np.conj(pts)], axis=1).astype(np.complex128)
        else:
            pts = pts.astype(np.float64)
        exps, coeffs = self._arrays
        return _kernels.poly_eval(exps, coeffs, pts, backend=backend)

    @property
    def _arrays(self):
        cached = self.__dict__.get("_arr")
        if cached is None:
            cached = self.poly.arrays()
            object.__setattr__(self, "_arr", cached)
        return cached

    def laplacian(self) -> MPoly:
        return laplacian_complex(self.poly) if self.is_complex else laplacian_real(self.poly)

    def total_degree(self) -> int:
        return sum(self.degree) if isinstance(self.degree, tuple) else self.degree


def _real(n: int, degree: int, path: tuple[str, ...], poly: MPoly) -> HarmonicElement:
    return HarmonicElement(n=n, degree=degree, path=path, poly=poly)


def _complex(n: int, degree: tuple[int, int], path: tuple[str, ...], poly: MPoly) -> HarmonicElement:
    return HarmonicElement(n=n, degree=degree, path=path, poly=poly, is_complex=True)


def constant(n: int, *, complex_: bool = False) -> HarmonicElement:
    if complex_:
        return _complex(n, (0, 0), ("0,0",), MPoly.constant(2 * n))
    return _real(n, 0, ("0",), MPoly.constant(n))


# ---------------------------------------------------------------------------
# homogenization


def homogenize_even_odd(poly: PolyRat, t: MPoly, rest: MPoly) -> MPoly:
    """Homogenize ``p(t)`` of fixed parity as ``sum_j c_j t^{k-2j} (rest + t^2)^j``.

    ``rest + t^2`` is the squared norm; on the sphere it equals 1.
    """
    k = poly.degree
    if k < 0:
        return MPoly(t.nvars)
    norm2 = rest + t * t
    out = MPoly(t.nvars)
    for j in range(k // 2 + 1):
        c = poly.coefficient(k - 2 * j)
        if c:
            out = out + (t ** (k - 2 * j)) * (norm2**j) * c
    if any(poly.coefficient(k - 2 * j - 1) for j in range(k // 2 + 1) if k - 2 * j - 1 >= 0):
        raise ValueError("polynomial is not of pure parity")
    return out


def homogenize_in_ratio(poly: PolyRat, num: MPoly, den: MPoly) -> MPoly:
    """``den^m * p(num/den)`` for ``m = deg p``."""
    m = poly.degree
    out = MPoly(num.nvars)
    for k, c in enumerate(poly.coeffs):
        if c:
            out = out + (num**k) * (den ** (m - k)) * c
    return out


# ---------------------------------------------------------------------------
# real case


def embed_real(phi: HarmonicElement, alpha: int) -> HarmonicElement:
    """``phi(x') * C_{alpha-alpha'}^{alpha' + (n-2)/2}(x_n)`` on ``S^{n-1}``, ``n = phi.n + 1``."""
    if phi.is_complex:
        raise TypeError("embed_real needs a real harmonic")
    ap = phi.degree
    if alpha < ap:
        raise DegreeError(f"alpha={alpha} < alpha'={ap}")
    n = phi.n + 1
    lam = ap + Fraction(n - 2, 2)
    c = gegenbauer(alpha - ap, lam)
    base = phi.poly.insert_variables([n - 1], n)
    t = MPoly.variable(n, n - 1)
    rest = norm_squared_real(n) - t * t
    poly = base * homogenize_even_odd(c, t, rest)
    return _real(n, alpha, (str(alpha),) + phi.path, poly)


def _circle_basis(alpha: int) -> list[HarmonicElement]:
    if alpha == 0:
        return [_real(2, 0, ("0",), MPoly.constant(2))]
    re, im = {}, {}
    for k in range(alpha + 1):
        c = binomial(alpha, k) * (-1) ** (k // 2)
        (re if k % 2 == 0 else im)[(alpha - k, k)] = c
    return [
        _real(2, alpha, (str(alpha), "c"), MPoly(2, re)),
        _real(2, alpha, (str(alpha), "s"), MPoly(2, im)),
    ]


@lru_cache(maxsize=None)
def _real_basis_cached(n: int, alpha: int) -> tuple[HarmonicElement, ...]:
    if n == 2:
        return tuple(_circle_basis(alpha))
    out = []
    for ap in range(alpha + 1):
        for phi in _real_basis_cached(n - 1, ap):
            out.append(embed_real(phi, alpha))
    return tuple(out)


def real_basis(n: int, alpha: int) -> list[HarmonicElement]:
    if n < 2:
        raise ValueError("real harmonics need n >= 2")
    return list(_real_basis_cached(n, alpha))


def real_dimension(n: int, alpha: int) -> int:
    a = math.comb(n + alpha - 1, alpha)
    b = math.comb(n + alpha - 3, alpha - 2) if alpha >= 2 else 0
    return a - b


def multiply_coordinate_real(phi: HarmonicElement, j: int) -> tuple[MPoly, MPoly]:
    """``x_j phi = phi^+ + |x|^2 phi^-`` with both summands harmonic.

    ``j`` is 0-based.  Returns the polynomials ``(phi^+, phi^-)``.
    """
    n, alpha = phi.n, phi.degree
    xj = MPoly.variable(n, j)
    d = phi.poly.diff(j)
    denom = n + 2 * alpha - 2
    minus = d.scale(Fraction(1, denom)) if denom else MPoly(n)
    plus = xj * phi.poly - norm_squared_real(n) * minus
    return plus, minus


def restrict_equator(phi: HarmonicElement) -> MPoly:
    """Set the last coordinate (``x_n`` or ``z_n``) to zero."""
    if phi.is_complex:
        return phi.poly.substitute_zero([phi.n - 1, 2 * phi.n - 1])
    return phi.poly.substitute_zero([phi.n - 1])


def plancherel_norm_real(n: int, alpha: int, alpha_p: int) -> float:
    """``||I phi||^2 / ||phi||^2`` for ``phi in H^{alpha'}(R^{n-1})`` embedded in degree ``alpha``."""
    if not 0 <= alpha_p <= alpha:
        raise DegreeError("need 0 <= alpha' <= alpha")
    mu = alpha_p + (n - 2) / 2
    pref = 2.0 ** (3 - n - 2 * alpha_p) * math.pi / (math.factorial(alpha - alpha_p) * (alpha + (n - 2) / 2))
    return pref * gamma_ratio_float([n - 2 + alpha + alpha_p], [mu, mu])


def restriction_norm_sq(n: int, alpha: int, alpha_p: int) -> float:
    """Squared norm of the restriction map on the embedded copy ``E(alpha; alpha')``."""
    if alpha < alpha_p:
        raise DegreeError("need alpha' <= alpha")
    if (alpha - alpha_p) % 2:
        raise ParityError("restriction vanishes unless alpha - alpha' is even")
    ell = (alpha - alpha_p) // 2
    pref = (alpha_p + 2 * ell + (n - 2) / 2) / math.pi
    return pref * gamma_ratio_float(
        [ell + 0.5, alpha_p + ell + (n - 2) / 2], [ell + 1, alpha_p + ell + (n - 1) / 2]
    )


def restriction_norm_sq_alt(n: int, alpha: int, alpha_p: int) -> float:
    """Same quantity written with a duplication-formula rearrangement."""
    if (alpha - alpha_p) % 2:
        raise ParityError("restriction vanishes unless alpha - alpha' is even")
    ell = (alpha - alpha_p) // 2
    mu = alpha_p + ell + (n - 2) / 2
    pref = 2.0 ** (2 * alpha_p + n - 3) * (alpha_p + 2 * ell + (n - 2) / 2) / math.pi
    return pref * gamma_ratio_float([2 * ell + 1, mu, mu], [ell + 1, ell + 1, 2 * alpha_p + 2 * ell + n - 2])


# ---------------------------------------------------------------------------
# complex case


def embed_complex(phi: HarmonicElement, a1: int, a2: int) -> HarmonicElement:
    """U(n-1)-equivariant embedding ``H^{a1',a2'}(C^{n-1}) -> H^{a1,a2}(C^n)``.

    ``phi(z') z_n^d P_m^{(d, a1'+a2'+n-2)}(1 - 2|z_n|^2)`` when
    ``d = (a1-a2) - (a1'-a2') >= 0`` (``m = a2 - a2'``), and the conjugate
    variant with ``zbar_n^{-d}`` and ``m = a1 - a1'`` otherwise.
    """
    if not phi.is_complex:
        raise TypeError("embed_complex needs a complex harmonic")
    b1, b2 = phi.degree
    if b1 > a1 or b2 > a2:
        raise DegreeError(f"({a1},{a2}) does not dominate ({b1},{b2})")
    if phi.poly.is_zero():
        raise EmptySpace("source space is zero")
    n = phi.n + 1
    d = (a1 - a2) - (b1 - b2)
    if d >= 0:
        m, mono = a2 - b2, MPoly.variable(2 * n, n - 1, d)
    else:
        m, mono = a1 - b1, MPoly.variable(2 * n, 2 * n - 1, -d)
    p = jacobi(m, abs(d), b1 + b2 + n - 2)
    head = norm_squared_complex(n, range(n - 1))
    tail = norm_squared_complex(n, [n - 1])
    radial = homogenize_in_ratio(p, head - tail, head + tail)
    base = phi.poly.insert_variables([n - 1, 2 * n - 1], 2 * n)
    poly = base * mono * radial
    return _complex(n, (a1, a2), (f"{a1},{a2}",) + phi.path, poly)


@lru_cache(maxsize=None)
def _complex_basis_cached(n: int, a1: int, a2: int) -> tuple[HarmonicElement, ...]:
    if n == 1:
        if a1 and a2:
            return ()
        e = (a1, a2)
        return (_complex(1, (a1, a2), (f"{a1},{a2}",), MPoly(2, {e: 1})),)
    out = []
    for b1 in range(a1 + 1):
        for b2 in range(a2 + 1):
            for phi in _complex_basis_cached(n - 1, b1, b2):
                out.append(embed_complex(phi, a1, a2))
    return tuple(out)


def complex_basis(n: int, a1: int, a2: int) -> list[HarmonicElement]:
    if n < 1:
        raise ValueError("complex harmonics need n >= 1")
    return list(_complex_basis_cached(n, a1, a2))


def complex_dimension(n: int, a1: int, a2: int) -> int:
    """``dim H^{a1,a2}(C^n)`` from the classical closed formula."""
    if n == 1:
        return 0 if a1 and a2 else 1
    return (a1 + a2 + n - 1) * math.comb(a1 + n - 2, n - 2) * math.comb(a2 + n - 2, n - 2) // (n - 1)


def multiply_coordinate_complex(phi: HarmonicElement, j: int, mode: str) -> tuple[MPoly, MPoly]:
    """Split ``z_j phi`` (mode ``"z"``) or ``zbar_j phi`` (mode ``"zbar"``).

    mode ``"z"``:    ``z_j phi    = phi^{+,hol}  + |z|^2 phi^{-,ahol}``
    mode ``"zbar"``: ``zbar_j phi = phi^{+,ahol} + |z|^2 phi^{-,hol}``
    Returns ``(plus, minus)`` with both parts harmonic.
    """
    n = phi.n
    a1, a2 = phi.degree
    denom = a1 + a2 + n - 1
    if mode == "z":
        var, dvar = MPoly.variable(2 * n, j), n + j
    elif mode == "zbar":
        var, dvar = MPoly.variable(2 * n, n + j), j
    else:
        raise ValueError("mode must be 'z' or 'zbar'")
    minus = phi.poly.diff(dvar).scale(Fraction(1, denom)) if denom else MPoly(2 * n)
    plus = var * phi.poly - norm_squared_complex(n) * minus
    return plus, minus


__all__ = [
    "HarmonicElement",
    "complex_basis",
    "complex_dimension",
    "constant",
    "embed_complex",
    "embed_real",
    "multiply_coordinate_complex",
    "multiply_coordinate_real",
    "plancherel_norm_real",
    "real_basis",
    "real_dimension",
    "restrict_equator",
    "restriction_norm_sq",
    "restriction_norm_sq_alt",
]
