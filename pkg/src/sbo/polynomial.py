"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are exponent tuples.  The complex-harmonic code treats ``z_k`` and
``conj(z_k)`` as independent variables (Wirtinger calculus), so the same
class serves both the real and the unitary case.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .numerics import RatLike, rat

Exponent = tuple[int, ...]


class MPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, RatLike] | None = None) -> None:
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not have {nvars} entries")
            c = rat(c)
            if c:
                clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c: RatLike = 1) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, k: int, power: int = 1) -> "MPoly":
        e = [0] * nvars
        e[k] = power
        return cls(nvars, {tuple(e): 1})

    # algebra --------------------------------------------------------------
    def __add__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MPoly(self.nvars, out)

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + other.scale(-1)

    def __neg__(self) -> "MPoly":
        return self.scale(-1)

    def __mul__(self, other: "MPoly | RatLike") -> "MPoly":
        if not isinstance(other, MPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        out = MPoly.constant(self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: RatLike) -> "MPoly":
        c = rat(c)
        return MPoly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "MPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError("polynomials live in different variable sets")

    # calculus -------------------------------------------------------------
    def diff(self, k: int) -> "MPoly":
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = c * e[k]
        return MPoly(self.nvars, out)

    def substitute_zero(self, ks: Iterable[int]) -> "MPoly":
        """Set the listed variables to 0 (and drop them from the tuple)."""
        ks = sorted(set(ks))
        keep = [i for i in range(self.nvars) if i not in ks]
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if all(e[k] == 0 for k in ks):
                f = tuple(e[i] for i in keep)
                out[f] = out.get(f, Fraction(0)) + c
        return MPoly(len(keep), out)

    def insert_variables(self, positions: Iterable[int], total: int) -> "MPoly":
        """Embed into ``total`` variables; ``positions`` are the new (absent) slots."""
        new = set(positions)
        old_slots = [i for i in range(total) if i not in new]
        if len(old_slots) != self.nvars:
            raise ValueError("slot count mismatch")
        out = {}
        for e, c in self.terms.items():
            f = [0] * total
            for i, v in zip(old_slots, e):
                f[i] = v
            out[tuple(f)] = c
        return MPoly(total, out)

    # inspection -----------------------------------------------------------
    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or ds == {degree})

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix and float coefficient vector (for fast evaluation)."""
        if not self.terms:
            return np.zeros((0, self.nvars), dtype=np.int64), np.zeros(0)
        items = sorted(self.terms.items())
        exps = np.array([e for e, _ in items], dtype=np.int64)
        coeffs = np.array([float(c) for _, c in items])
        return exps, coeffs

    def evaluate_exact(self, point: Iterable[RatLike]) -> Fraction:
        pt = [rat(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term *= x**k
            total += term
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "MPoly(0)"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"v{i}^{k}" if k > 1 else f"v{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "MPoly(" + " + ".join(parts) + ")"


def norm_squared_real(nvars: int) -> MPoly:
    """``|x|^2`` in ``nvars`` real variables."""
    return MPoly(nvars, {tuple(2 if i == k else 0 for i in range(nvars)): 1 for k in range(nvars)})


def norm_squared_complex(n: int, which: Iterable[int] | None = None) -> MPoly:
    """``sum_k z_k conj(z_k)`` over the listed complex coordinates (all by default).

    Variables are ordered ``(z_1..z_n, zbar_1..zbar_n)``.
    """
    ks = range(n) if which is None else which
    terms = {}
    for k in ks:
        e = [0] * (2 * n)
        e[k] = 1
        e[n + k] = 1
        terms[tuple(e)] = 1
    return MPoly(2 * n, terms)


def laplacian_real(p: MPoly) -> MPoly:
    out = MPoly(p.nvars)
    for k in range(p.nvars):
        out = out + p.diff(k).diff(k)
    return out


def laplacian_complex(p: MPoly) -> MPoly:
    """``4 sum_k d/dz_k d/dzbar_k``."""
    n = p.nvars // 2
    out = MPoly(p.nvars)
    for k in range(n):
        out = out + p.diff(k).diff(n + k)
    return out.scale(4)
