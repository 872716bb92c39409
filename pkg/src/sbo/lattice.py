"""K-type pair lattices, spectrum eigenvalues, lambda constants and relation rows.

Two group cases share one interface:

* ``GroupCase("real", n)``: K-types ``alpha`` (degrees of harmonics on
  ``S^{n-1}``), K'-types ``alpha'``; pairs ``(alpha, alpha')`` with
  ``0 <= alpha' <= alpha`` and ``alpha - alpha'`` even.
* ``GroupCase("complex", n)``: K-types ``(a1, a2)``, K'-types
  ``(a1', a2')``; pairs with ``a1' <= a1``, ``a2' <= a2`` and
  ``a1 - a2 = a1' - a2'``.  For ``n = 2`` the K'-types with ``a1' a2' > 0``
  do not occur (``H^{a1',a2'}(C^1) = 0``) and are excluded.

A *relation row* is a sparse linear functional ``{pair: coefficient}`` that
vanishes on every admissible scalar table ``t``; rows are written as
``(right-hand side) - (left-hand side)`` of the printed relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterator, NamedTuple, Union

from .errors import InternalConsistencyError, LatticeError, ParameterError, SingularSystem
from .numerics import RatLike, format_rat, rat

REAL, COMPLEX = "real", "complex"


class RealPair(NamedTuple):
    a: int
    ap: int

    @property
    def ktype(self) -> int:
        return self.a

    @property
    def ktype_prime(self) -> int:
        return self.ap

    def key(self) -> tuple[int, ...]:
        return (self.a + self.ap, self.a, self.ap)

    def __str__(self) -> str:
        return f"{self.a},{self.ap}"


class ComplexPair(NamedTuple):
    a1: int
    a2: int
    a1p: int
    a2p: int

    @classmethod
    def from_reduced(cls, p: int, q1: int, q2: int) -> "ComplexPair":
        if (p + q1 - q2) % 2:
            raise LatticeError(f"(p,q1,q2)=({p},{q1},{q2}) has the wrong parity")
        return cls((p + q1 - q2) // 2, (p - q1 + q2) // 2, q1, q2)

    @property
    def p(self) -> int:
        return self.a1 + self.a2

    @property
    def q1(self) -> int:
        return self.a1p

    @property
    def q2(self) -> int:
        return self.a2p

    @property
    def reduced(self) -> tuple[int, int, int]:
        return (self.p, self.q1, self.q2)

    @property
    def ktype(self) -> tuple[int, int]:
        return (self.a1, self.a2)

    @property
    def ktype_prime(self) -> tuple[int, int]:
        return (self.a1p, self.a2p)

    def key(self) -> tuple[int, ...]:
        return (self.a1 + self.a2 + self.a1p + self.a2p, self.a1, self.a2, self.a1p, self.a2p)

    def __str__(self) -> str:
        return f"{self.a1},{self.a2};{self.a1p},{self.a2p}"


Pair = Union[RealPair, ComplexPair]
KType = Union[int, tuple[int, int]]

REAL_DIRECTIONS = ("ap+1", "ap-1")
COMPLEX_DIRECTIONS = ("q1+1", "q1-1", "q2+1", "q2-1")


@dataclass(frozen=True)
class Params:
    r: Fraction
    rp: Fraction

    def __init__(self, r: RatLike, rp: RatLike) -> None:
        object.__setattr__(self, "r", rat(r))
        object.__setattr__(self, "rp", rat(rp))

    def as_json(self) -> dict[str, str]:
        return {"r": format_rat(self.r), "rp": format_rat(self.rp)}


@dataclass(frozen=True)
class GroupCase:
    family: str
    n: int

    def __post_init__(self) -> None:
        if self.family not in (REAL, COMPLEX):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == REAL and self.n < 3:
            raise ValueError("the real case needs n >= 3")
        if self.family == COMPLEX and self.n < 2:
            raise ValueError("the complex case needs n >= 2")

    @property
    def is_real(self) -> bool:
        return self.family == REAL

    @cached_property
    def rho(self) -> Fraction:
        return Fraction(self.n - 1, 2) if self.is_real else Fraction(self.n)

    @cached_property
    def rho_prime(self) -> Fraction:
        return Fraction(self.n - 2, 2) if self.is_real else Fraction(self.n - 1)

    @property
    def directions(self) -> tuple[str, ...]:
        return REAL_DIRECTIONS if self.is_real else COMPLEX_DIRECTIONS

    def __str__(self) -> str:
        return f"{self.family}(n={self.n})"

    # ---------------------------------------------------------------- pairs
    def pair(self, *idx: int) -> Pair:
        p = RealPair(*idx) if self.is_real else ComplexPair(*idx)
        if not self.contains(p):
            raise LatticeError(f"{p} is not a lattice pair for {self}")
        return p

    def ktype_prime_valid(self, kp: KType) -> bool:
        if self.is_real:
            return kp >= 0
        b1, b2 = kp
        if b1 < 0 or b2 < 0:
            return False
        return not (self.n == 2 and b1 > 0 and b2 > 0)

    def contains(self, p: Pair) -> bool:
        if self.is_real:
            if not isinstance(p, RealPair):
                return False
            return 0 <= p.ap <= p.a and (p.a - p.ap) % 2 == 0
        if not isinstance(p, ComplexPair):
            return False
        return (
            0 <= p.a1p <= p.a1
            and 0 <= p.a2p <= p.a2
            and p.a1 - p.a2 == p.a1p - p.a2p
            and self.ktype_prime_valid((p.a1p, p.a2p))
        )

    def in_window(self, p: Pair, window: int) -> bool:
        return p.a <= window if self.is_real else max(p.a1, p.a2) <= window

    def pairs(self, window: int) -> list[Pair]:
        """All lattice pairs in the window, ordered by total degree then lexicographically."""
        out: list[Pair] = []
        if self.is_real:
            for a in range(window + 1):
                for ap in range(a % 2, a + 1, 2):
                    out.append(RealPair(a, ap))
        else:
            for a1 in range(window + 1):
                for a2 in range(window + 1):
                    for b1 in range(a1 + 1):
                        b2 = b1 - a1 + a2
                        p = ComplexPair(a1, a2, b1, b2)
                        if self.contains(p):
                            out.append(p)
        out.sort(key=lambda p: p.key())
        return out


def parse_pair(case: GroupCase, text: str) -> Pair:
    """``"a,ap"`` (real) or ``"a1,a2;a1p,a2p"`` (complex)."""
    try:
        if case.is_real:
            a, ap = (int(x) for x in text.split(","))
            p: Pair = RealPair(a, ap)
        else:
            left, right = text.split(";")
            a1, a2 = (int(x) for x in left.split(","))
            b1, b2 = (int(x) for x in right.split(","))
            p = ComplexPair(a1, a2, b1, b2)
    except ValueError as exc:
        raise LatticeError(f"cannot parse pair {text!r} for {case}") from exc
    if not case.contains(p):
        raise LatticeError(f"{text!r} is not a lattice pair for {case}")
    return p


# ---------------------------------------------------------------------------
# spectrum eigenvalues


def sigma(case: GroupCase, k: KType) -> Fraction:
    n = case.n
    if case.is_real:
        return Fraction(k * (k + n - 2))
    a1, a2 = k
    return Fraction(2 * a1 * (a1 + n - 1) + 2 * a2 * (a2 + n - 1))


def sigma_prime(case: GroupCase, k: KType) -> Fraction:
    n = case.n
    if case.is_real:
        return Fraction(k * (k + n - 3))
    a1, a2 = k
    return Fraction(2 * a1 * (a1 + n - 2) + 2 * a2 * (a2 + n - 2))


# ---------------------------------------------------------------------------
# lambda constants


def target_ktype_prime(case: GroupCase, pair: Pair, direction: str) -> KType:
    if case.is_real:
        return pair.ap + (1 if direction == "ap+1" else -1)
    b1, b2 = pair.a1p, pair.a2p
    return {
        "q1+1": (b1 + 1, b2),
        "q1-1": (b1 - 1, b2),
        "q2+1": (b1, b2 + 1),
        "q2-1": (b1, b2 - 1),
    }[direction]


def _check_direction(case: GroupCase, direction: str) -> None:
    if direction not in case.directions:
        raise ValueError(f"direction {direction!r} is not one of {case.directions}")


def formal_neighbors(case: GroupCase, pair: Pair, direction: str) -> list[Pair]:
    """The two candidate pairs ``(beta; beta')`` next to ``pair`` in ``direction``.

    They may fall off the lattice; their lambda then vanishes.
    """
    _check_direction(case, direction)
    if case.is_real:
        a = pair.a
        bp = target_ktype_prime(case, pair, direction)
        return [RealPair(a + 1, bp), RealPair(a - 1, bp)]
    a1, a2 = pair.a1, pair.a2
    b1, b2 = target_ktype_prime(case, pair, direction)
    shifts = {
        "q1+1": [(1, 0), (0, -1)],
        "q1-1": [(-1, 0), (0, 1)],
        "q2+1": [(0, 1), (-1, 0)],
        "q2-1": [(0, -1), (1, 0)],
    }[direction]
    return [ComplexPair(a1 + s1, a2 + s2, b1, b2) for s1, s2 in shifts]


def lambda_closed(case: GroupCase, pair: Pair, direction: str) -> list[tuple[Pair, Fraction]]:
    """Closed-form lambda constants for the neighbors of ``pair`` towards ``direction``.

    Returns ``[]`` when the target K'-type does not exist.
    """
    _check_direction(case, direction)
    if not case.ktype_prime_valid(target_ktype_prime(case, pair, direction)):
        return []
    n = case.n
    nb = formal_neighbors(case, pair, direction)
    if case.is_real:
        a, ap = pair.a, pair.ap
        d = Fraction(2 * a + n - 2)
        if direction == "ap+1":
            vals = [(a + ap + n - 2) / d, (a - ap) / d]
        else:
            vals = [(a - ap + 1) / d, (a + ap + n - 3) / d]
    else:
        a1, a2, b1, b2 = pair
        d = Fraction(a1 + a2 + n - 1)
        vals = {
            "q1+1": [(b1 + a2 + n - 1) / d, (a1 - b1) / d],
            "q1-1": [(b1 + a2 + n - 2) / d, (a1 - b1 + 1) / d],
            "q2+1": [(a1 + b2 + n - 1) / d, (a2 - b2) / d],
            "q2-1": [(a1 + b2 + n - 2) / d, (a2 - b2 + 1) / d],
        }[direction]
    return list(zip(nb, vals))


def lambda_from_lemma(case: GroupCase, pair: Pair, direction: str) -> list[tuple[Pair, Fraction]]:
    """Solve the 2x2 system ``sum l = 1``, ``sum l (s_b - s_a) = s'_b' - s'_a' + 2(rho - rho')``."""
    _check_direction(case, direction)
    bp = target_ktype_prime(case, pair, direction)
    if not case.ktype_prime_valid(bp):
        return []
    nb = formal_neighbors(case, pair, direction)
    s_a = sigma(case, pair.ktype)
    d1, d2 = (sigma(case, b.ktype) - s_a for b in nb)
    rhs = sigma_prime(case, bp) - sigma_prime(case, pair.ktype_prime) + 2 * (case.rho - case.rho_prime)
    det = d2 - d1
    if det == 0:
        raise SingularSystem(f"degenerate lambda system at {pair}, {direction}")
    l1 = (d2 - rhs) / det
    l2 = (rhs - d1) / det
    return [(nb[0], l1), (nb[1], l2)]


# ---------------------------------------------------------------------------
# relation rows


Row = dict  # Pair -> Fraction


def _add(row: Row, p: Pair, c: Fraction) -> None:
    if c:
        row[p] = row.get(p, Fraction(0)) + c
        if not row[p]:
            del row[p]


def relation_row(case: GroupCase, params: Params, pair: Pair, direction: str) -> Row:
    """The printed relation for ``pair`` towards ``direction`` as ``{pair: coeff}``.

    The row is ``RHS - LHS`` and annihilates any admissible table.  Returns an
    empty row when the target K'-type does not exist.
    """
    if not case.contains(pair):
        raise LatticeError(f"{pair} is not on the lattice")
    _check_direction(case, direction)
    bp = target_ktype_prime(case, pair, direction)
    if not case.ktype_prime_valid(bp):
        return {}
    r, rp, n = params.r, params.rp, case.n
    nb = formal_neighbors(case, pair, direction)
    if case.is_real:
        a, ap = pair.a, pair.ap
        if direction == "ap+1":
            lhs = (2 * a + n - 2) * (2 * rp + 2 * ap + n - 2)
            c1 = (a + ap + n - 2) * (2 * r + 2 * a + n - 1)
            c2 = (a - ap) * (2 * r - 2 * a - n + 3)
        else:
            lhs = (2 * a + n - 2) * (2 * rp - 2 * ap - n + 4)
            c1 = (a - ap + 1) * (2 * r + 2 * a + n - 1)
            c2 = (a + ap + n - 3) * (2 * r - 2 * a - n + 3)
    else:
        a1, a2, b1, b2 = pair
        d = a1 + a2 + n - 1
        if direction == "q1+1":
            lhs = d * (rp + 2 * b1 + n - 1)
            c1 = (b1 + a2 + n - 1) * (r + 2 * a1 + n)
            c2 = (a1 - b1) * (r - 2 * a2 - n + 2)
        elif direction == "q1-1":
            lhs = d * (rp - 2 * b1 - n + 3)
            c1 = (b1 + a2 + n - 2) * (r - 2 * a1 - n + 2)
            c2 = (a1 - b1 + 1) * (r + 2 * a2 + n)
        elif direction == "q2+1":
            lhs = d * (rp + 2 * b2 + n - 1)
            c1 = (a1 + b2 + n - 1) * (r + 2 * a2 + n)
            c2 = (a2 - b2) * (r - 2 * a1 - n + 2)
        else:
            lhs = d * (rp - 2 * b2 - n + 3)
            c1 = (a1 + b2 + n - 2) * (r - 2 * a2 - n + 2)
            c2 = (a2 - b2 + 1) * (r + 2 * a1 + n)
    row: Row = {}
    _add(row, pair, -Fraction(lhs))
    for q, c in zip(nb, (Fraction(c1), Fraction(c2))):
        if case.contains(q):
            _add(row, q, c)
        elif c and _structural_factor_nonzero(case, pair, direction, q):
            raise InternalConsistencyError(f"{pair} {direction}: off-lattice {q} has coefficient {c}")
    return row


def _structural_factor_nonzero(case: GroupCase, pair: Pair, direction: str, q: Pair) -> bool:
    """True when the r-independent factor of the term for ``q`` is nonzero."""
    lam = dict(lambda_closed(case, pair, direction))
    return lam.get(q, Fraction(0)) != 0


def framework_row(case: GroupCase, params: Params, pair: Pair, direction: str) -> Row:
    """Relation built from the general scheme
    ``sum lambda (s_b - s_a + 2r) t_b = (s'_b' - s'_a' + 2r') t_a``.

    Independent of :func:`relation_row`; the two agree up to a positive factor.
    """
    bp = target_ktype_prime(case, pair, direction)
    if not case.ktype_prime_valid(bp):
        return {}
    s_a = sigma(case, pair.ktype)
    row: Row = {}
    lhs = sigma_prime(case, bp) - sigma_prime(case, pair.ktype_prime) + 2 * params.rp
    _add(row, pair, -lhs)
    for q, lam in lambda_from_lemma(case, pair, direction):
        if lam and case.contains(q):
            _add(row, q, lam * (sigma(case, q.ktype) - s_a + 2 * params.r))
    return row


def framework_scale(case: GroupCase, pair: Pair) -> Fraction:
    """Factor with ``relation_row == framework_scale * framework_row``."""
    if case.is_real:
        return Fraction(2 * pair.a + case.n - 2)
    return Fraction(pair.a1 + pair.a2 + case.n - 1, 2)


def apply_row(row: Row, table: Callable[[Pair], Fraction] | dict) -> Fraction:
    get = table.__getitem__ if isinstance(table, dict) else table
    return sum((c * get(p) for p, c in row.items()), Fraction(0))


def all_rows(case: GroupCase, params: Params, window: int) -> Iterator[tuple[Pair, str, Row]]:
    """Every relation row whose referenced pairs all lie in the window."""
    for p in case.pairs(window):
        for d in case.directions:
            row = relation_row(case, params, p, d)
            if row and all(case.in_window(q, window) for q in row):
                yield p, d, row


def diagonal_row(case: GroupCase, params: Params, k: KType, which: int = 1) -> Row:
    """Two-term diagonal recurrence starting at the diagonal pair with K'-type ``k``.

    Real: ``(2r'+2a+n-2) t_{a,a} = (2r+2a+n-1) t_{a+1,a+1}``.  Complex
    (``which`` = 1 or 2 selects the coordinate):
    ``(r'+2q+n-1) t_{q1+q2,q1,q2} = (r+2q+n) t_{next}``.
    """
    r, rp, n = params.r, params.rp, case.n
    if case.is_real:
        a = k
        return {RealPair(a, a): -(2 * rp + 2 * a + n - 2), RealPair(a + 1, a + 1): 2 * r + 2 * a + n - 1}
    q1, q2 = k
    src = ComplexPair(q1, q2, q1, q2)
    if which == 1:
        return {src: -(rp + 2 * q1 + n - 1), ComplexPair(q1 + 1, q2, q1 + 1, q2): r + 2 * q1 + n}
    return {src: -(rp + 2 * q2 + n - 1), ComplexPair(q1, q2 + 1, q1, q2 + 1): r + 2 * q2 + n}


# ---------------------------------------------------------------------------
# singular parameter sets


@dataclass(frozen=True)
class SingularClass:
    kind: str  # "Generic" | "L_even" | "L_odd" | "L"
    i: int | None = None
    j: int | None = None

    def __str__(self) -> str:
        if self.kind == "Generic":
            return "Generic"
        return f"{self.kind}({self.i},{self.j})"

    @property
    def is_singular(self) -> bool:
        return self.kind in ("L_even", "L")


def _as_natural(x: Fraction) -> int | None:
    if x.denominator == 1 and x >= 0:
        return int(x)
    return None


def real_index(case: GroupCase, r: Fraction) -> int | None:
    """``i`` with ``r = -rho - i`` (real) or ``r = -rho - 2i`` (complex), if any."""
    x = -case.rho - r
    if case.is_real:
        return _as_natural(x)
    return _as_natural(x / 2)


def prime_index(case: GroupCase, rp: Fraction) -> int | None:
    x = -case.rho_prime - rp
    if case.is_real:
        return _as_natural(x)
    return _as_natural(x / 2)


def singular_set_membership(case: GroupCase, params: Params) -> SingularClass:
    i, j = real_index(case, params.r), prime_index(case, params.rp)
    if i is None or j is None:
        return SingularClass("Generic")
    if case.is_real:
        if i >= j and (i - j) % 2 == 0:
            return SingularClass("L_even", i, j)
        if i > j:
            return SingularClass("L_odd", i, j)
        return SingularClass("Generic")
    if j <= i:
        return SingularClass("L", i, j)
    return SingularClass("Generic")


# ---------------------------------------------------------------------------
# composition factors


REAL_KINDS = ("Full", "F", "T")
COMPLEX_KINDS = ("Full", "F", "Fplus", "Fminus", "Tplus", "Tminus", "T")


@dataclass(frozen=True)
class CompositionFactor:
    """A subquotient ``module / sub`` of a principal series, described by K-type supports.

    ``side`` is ``"G"`` (source) or ``"G'"`` (target).  ``i`` is the
    reducibility index at parameter ``-rho - i`` (real) or ``-rho - 2i``
    (complex) on that side.
    """

    kind: str = "Full"
    i: int = 0
    side: str = "G"

    def __str__(self) -> str:
        prime = "'" if self.side == "G'" else ""
        return self.kind + prime if self.kind == "Full" else f"{self.kind}{prime}({self.i})"

    def validate(self, case: GroupCase) -> None:
        kinds = REAL_KINDS if case.is_real else COMPLEX_KINDS
        if self.kind not in kinds:
            raise ParameterError(f"factor kind {self.kind!r} not available for {case.family}")
        if self.side not in ("G", "G'"):
            raise ParameterError(f"bad side {self.side!r}")
        if self.i < 0:
            raise ParameterError("factor index must be natural")

    def module_and_sub(self, case: GroupCase) -> tuple[Callable[[KType], bool], Callable[[KType], bool]]:
        """Predicates for the ambient submodule and the submodule quotiented out."""
        i = self.i
        everything = lambda k: True  # noqa: E731
        nothing = lambda k: False  # noqa: E731
        if case.is_real:
            f = lambda k: k <= i  # noqa: E731
            return {"Full": (everything, nothing), "F": (f, nothing), "T": (everything, f)}[self.kind]
        f = lambda k: k[0] <= i and k[1] <= i  # noqa: E731
        fplus = lambda k: k[1] <= i  # noqa: E731
        fminus = lambda k: k[0] <= i  # noqa: E731
        fsum = lambda k: k[0] <= i or k[1] <= i  # noqa: E731
        return {
            "Full": (everything, nothing),
            "F": (f, nothing),
            "Fplus": (fplus, nothing),
            "Fminus": (fminus, nothing),
            "Tplus": (fplus, f),
            "Tminus": (fminus, f),
            "T": (everything, fsum),
        }[self.kind]


def support_mask(case: GroupCase, factor: CompositionFactor) -> Callable[[KType], bool]:
    """K-types carried by the subquotient (the module support minus the sub support)."""
    factor.validate(case)
    mod, sub = factor.module_and_sub(case)
    return lambda k: mod(k) and not sub(k)


def parse_factor(text: str, side: str = "G") -> CompositionFactor:
    """Parse ``Full``, ``F(2)``, ``Tplus(1)`` etc.; a trailing prime is accepted."""
    t = text.strip().replace("'", "")
    if t == "Full":
        return CompositionFactor("Full", 0, side)
    if "(" not in t or not t.endswith(")"):
        raise ParameterError(f"cannot parse composition factor {text!r}")
    kind, idx = t[:-1].split("(")
    return CompositionFactor(kind, int(idx), side)


__all__ = [
    "COMPLEX",
    "ComplexPair",
    "CompositionFactor",
    "GroupCase",
    "Pair",
    "Params",
    "REAL",
    "RealPair",
    "SingularClass",
    "all_rows",
    "apply_row",
    "diagonal_row",
    "formal_neighbors",
    "framework_row",
    "framework_scale",
    "lambda_closed",
    "lambda_from_lemma",
    "parse_factor",
    "parse_pair",
    "prime_index",
    "real_index",
    "relation_row",
    "sigma",
    "sigma_prime",
    "singular_set_membership",
    "support_mask",
]
