"""Exact solution spaces of the truncated relation system.

The unknowns are the scalars ``t_{alpha,alpha'}`` on the lattice pairs in a
window; the constraints are the relation rows.  For an intertwiner between
subquotients ``V = M/S`` (source) and ``W = M'/S'`` (target) the unknowns are
the pairs with ``alpha`` in ``M`` minus ``S`` and ``alpha'`` in ``M'`` minus
``S'``, every other scalar is a known zero, and a row is imposed for each
source pair with ``alpha`` in ``M`` and each target K'-type in ``M'`` minus
``S'``.

Elimination is sparse and fraction-free over the integers: rows are kept
primitive (content removed) and reduced on their highest column, which makes
the process behave like the propagation along the lattice that the relations
describe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InternalConsistencyError, MismatchError, ParameterError, WindowTooSmall, WindowUnstable
from .lattice import (
    CompositionFactor,
    GroupCase,
    Pair,
    Params,
    formal_neighbors,
    prime_index,
    real_index,
    relation_row,
    singular_set_membership,
    target_ktype_prime,
)
from .numerics import format_rat
from .spectral import SpectralTable, closed_form_table

FULL = CompositionFactor("Full", 0, "G")
FULL_PRIME = CompositionFactor("Full", 0, "G'")

MIN_GENERIC_WINDOW = 10
WINDOW_STEP = 4


# ---------------------------------------------------------------------------
# assembly


@dataclass
class ConstraintSystem:
    case: GroupCase
    params: Params
    window: int
    v_factor: CompositionFactor
    w_factor: CompositionFactor
    unknowns: list[Pair]
    rows: list[dict[int, int]]  # column index -> integer coefficient
    dropped_rows: int = 0

    @property
    def index(self) -> dict[Pair, int]:
        return {p: k for k, p in enumerate(self.unknowns)}

    def summary(self) -> dict:
        return {
            "case": {"family": self.case.family, "n": self.case.n},
            "params": self.params.as_json(),
            "window": self.window,
            "v": str(self.v_factor),
            "w": str(self.w_factor),
            "unknowns": len(self.unknowns),
            "rows": len(self.rows),
            "dropped_rows": self.dropped_rows,
        }


def barrier_indices(case: GroupCase, params: Params, *factors: CompositionFactor) -> list[int]:
    """Reducibility indices implied by the parameters and the requested factors."""
    out = [x for x in (real_index(case, params.r), prime_index(case, params.rp)) if x is not None]
    out += [f.i for f in factors if f.kind != "Full"]
    return out


def recommended_window(case: GroupCase, params: Params, *factors: CompositionFactor) -> int:
    """``2(i+j) + 10`` on the singular lattice, ``10`` otherwise."""
    cls = singular_set_membership(case, params)
    i = real_index(case, params.r) or 0
    j = prime_index(case, params.rp) or 0
    extra = max([f.i for f in factors if f.kind != "Full"], default=0)
    if cls.kind == "Generic" and not any(f.kind != "Full" for f in factors):
        return MIN_GENERIC_WINDOW
    return max(2 * (i + j) + 10, 2 * extra + 10, MIN_GENERIC_WINDOW)


def _check_factor(case: GroupCase, params: Params, factor: CompositionFactor, expected_side: str) -> None:
    factor.validate(case)
    if factor.side != expected_side:
        raise ParameterError(f"factor {factor} is on the wrong side (expected {expected_side})")
    if factor.kind == "Full":
        return
    idx = real_index(case, params.r) if expected_side == "G" else prime_index(case, params.rp)
    if idx != factor.i:
        which = "r" if expected_side == "G" else "r'"
        raise ParameterError(f"{factor} needs {which} at the reducibility point of index {factor.i}")


def _to_integer_row(row: dict[int, Fraction]) -> dict[int, int]:
    den = 1
    for c in row.values():
        den = math.lcm(den, c.denominator)
    ints = {k: int(c * den) for k, c in row.items()}
    return _primitive(ints)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for c in row.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    if g > 1:
        row = {k: c // g for k, c in row.items()}
    # sign normalization: leading (highest) coefficient positive
    if row and row[max(row)] < 0:
        row = {k: -c for k, c in row.items()}
    return row


def assemble(
    case: GroupCase,
    params: Params,
    window: int,
    v_factor: CompositionFactor = FULL,
    w_factor: CompositionFactor = FULL_PRIME,
) -> ConstraintSystem:
    _check_factor(case, params, v_factor, "G")
    _check_factor(case, params, w_factor, "G'")
    bars = barrier_indices(case, params, v_factor, w_factor)
    if any(b > window - 4 for b in bars):
        raise WindowTooSmall(f"window {window} too small for barrier indices {bars} (need >= {max(bars) + 4})")
    mod_v, sub_v = v_factor.module_and_sub(case)
    mod_w, sub_w = w_factor.module_and_sub(case)

    def eff_w(kp) -> bool:
        return mod_w(kp) and not sub_w(kp)

    def is_unknown(p: Pair) -> bool:
        return mod_v(p.ktype) and not sub_v(p.ktype) and eff_w(p.ktype_prime)

    all_pairs = case.pairs(window)
    unknowns = [p for p in all_pairs if is_unknown(p)]
    index = {p: k for k, p in enumerate(unknowns)}
    rows: list[dict[int, int]] = []
    dropped = 0
    for p in all_pairs:
        if not mod_v(p.ktype):
            continue
        for d in case.directions:
            bp = target_ktype_prime(case, p, d)
            if not case.ktype_prime_valid(bp) or not eff_w(bp):
                continue
            row = relation_row(case, params, p, d)
            _check_closed_under_action(case, p, d, row, mod_v)
            frac_row: dict[int, Fraction] = {}
            outside = False
            for q, c in row.items():
                if not is_unknown(q):
                    continue
                if not case.in_window(q, window):
                    outside = True
                    break
                frac_row[index[q]] = frac_row.get(index[q], Fraction(0)) + c
            if outside:
                dropped += 1
                continue
            frac_row = {k: c for k, c in frac_row.items() if c}
            if frac_row:
                rows.append(_to_integer_row(frac_row))
    return ConstraintSystem(case, params, window, v_factor, w_factor, unknowns, rows, dropped)


def _check_closed_under_action(case: GroupCase, p: Pair, d: str, row: dict, mod_v) -> None:
    """A source in the module must not reach K-types outside it with a nonzero coefficient."""
    for q in formal_neighbors(case, p, d):
        if case.contains(q) and not mod_v(q.ktype) and row.get(q, 0):
            raise InternalConsistencyError(f"row {p} {d} leaves the source module through {q}")


# ---------------------------------------------------------------------------
# elimination


@dataclass
class SolutionBasis:
    system: ConstraintSystem
    tables: list[SpectralTable] = field(default_factory=list)
    rank: int = 0

    @property
    def dimension(self) -> int:
        return len(self.tables)

    def to_json_obj(self) -> dict:
        return {
            "system": self.system.summary(),
            "rank": self.rank,
            "dimension": self.dimension,
            "basis": [t.to_json_obj()["values"] for t in self.tables],
        }


def echelonize(rows: Iterable[dict[int, int]]) -> dict[int, dict[int, int]]:
    """Incremental fraction-free echelon form keyed by each row's highest column."""
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = max(row)
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = _primitive(row)
                break
            a, b = piv[lead], row[lead]
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            new: dict[int, int] = {}
            for k, c in row.items():
                new[k] = fa * c
            for k, c in piv.items():
                v = new.get(k, 0) - fb * c
                if v:
                    new[k] = v
                else:
                    new.pop(k, None)
            new.pop(lead, None)
            row = _primitive(new) if new else new
    return pivots


def _rref(vectors: list[list[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon form (leading = first nonzero entry in the unknown order)."""
    m = [list(v) for v in vectors]
    out: list[list[Fraction]] = []
    ncols = len(m[0]) if m else 0
    col = 0
    while m and col < ncols:
        k = next((i for i, v in enumerate(m) if v[col]), None)
        if k is None:
            col += 1
            continue
        v = m.pop(k)
        lead = v[col]
        v = [x / lead for x in v]
        m = [[x - w[col] * y for x, y in zip(w, v)] if w[col] else w for w in m]
        out = [[x - o[col] * y for x, y in zip(o, v)] if o[col] else o for o in out]
        out.append(v)
        col += 1
    return out


def nullspace(system: ConstraintSystem) -> SolutionBasis:
    """Exact basis of the solutions, in reduced echelon form."""
    ncols = len(system.unknowns)
    pivots = echelonize(system.rows)
    free = [c for c in range(ncols) if c not in pivots]
    vectors: list[list[Fraction]] = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for c in range(f + 1, ncols):
            row = pivots.get(c)
            if row is None:
                continue
            s = sum((coef * x[k] for k, coef in row.items() if k != c and x[k]), Fraction(0))
            if s:
                x[c] = -s / row[c]
        vectors.append(x)
    vectors = _rref(vectors)
    tables = [
        SpectralTable(system.case, system.params, system.window, {p: v[k] for k, p in enumerate(system.unknowns)}, "basis")
        for v in vectors
    ]
    return SolutionBasis(system, tables, len(pivots))


def check_basis(basis: SolutionBasis) -> None:
    """Every basis vector annihilates every row (raises on failure)."""
    for t in basis.tables:
        vals = [t.values[p] for p in basis.system.unknowns]
        for row in basis.system.rows:
            if sum(c * vals[k] for k, c in row.items()):
                raise InternalConsistencyError("basis vector violates a row")


def restrict_vanishing(basis: SolutionBasis, predicate) -> list[SpectralTable]:
    """Basis (reduced echelon) of the solutions vanishing on every pair where ``predicate`` holds."""
    unknowns = basis.system.unknowns
    cond = [p for p in unknowns if predicate(p)]
    # coefficient vectors c with sum_k c_k v_k(p) = 0 for p in cond
    m = len(basis.tables)
    if m == 0:
        return []
    rows = [[t.values[p] for t in basis.tables] for p in cond]
    red = _rref(rows) if rows else []
    pivots = [next(k for k, x in enumerate(r) if x) for r in red]
    free = [k for k in range(m) if k not in pivots]
    combos = []
    for f in free:
        c = [Fraction(0)] * m
        c[f] = Fraction(1)
        for r, pk in zip(red, pivots):
            c[pk] = -r[f]
        combos.append(c)
    vecs = [[sum((ck * t.values[p] for ck, t in zip(c, basis.tables)), Fraction(0)) for p in unknowns] for c in combos]
    vecs = _rref(vecs)
    return [
        SpectralTable(basis.system.case, basis.system.params, basis.system.window, dict(zip(unknowns, v)), "restricted")
        for v in vecs
    ]


def contains_table(basis: SolutionBasis, table: SpectralTable) -> bool:
    """Whether ``table`` (restricted to the unknowns) lies in the span of the basis."""
    unknowns = basis.system.unknowns
    vecs = [[t.values[p] for p in unknowns] for t in basis.tables]
    target = [table.get(p) for p in unknowns]
    return len(_rref(vecs + [target])) == len(_rref(vecs)) if vecs else not any(target)


# ---------------------------------------------------------------------------
# multiplicities and comparisons


@dataclass
class MultiplicityResult:
    case: GroupCase
    params: Params
    v_factor: CompositionFactor
    w_factor: CompositionFactor
    multiplicity: int
    window: int
    dims: list[tuple[int, int]]
    stable: bool

    def to_json_obj(self) -> dict:
        return {
            "params": self.params.as_json(),
            "v": str(self.v_factor),
            "w": str(self.w_factor),
            "multiplicity": self.multiplicity,
            "window": self.window,
            "stable": self.stable,
            "dims": [[w, d] for w, d in self.dims],
            "set": str(singular_set_membership(self.case, self.params)),
        }


def window_dimensions(
    case: GroupCase,
    params: Params,
    windows: Iterable[int],
    v_factor: CompositionFactor = FULL,
    w_factor: CompositionFactor = FULL_PRIME,
) -> list[tuple[int, int]]:
    return [(w, nullspace(assemble(case, params, w, v_factor, w_factor)).dimension) for w in windows]


def multiplicity(
    case: GroupCase,
    params: Params,
    v_factor: CompositionFactor = FULL,
    w_factor: CompositionFactor = FULL_PRIME,
    window: int | None = None,
    strict: bool = True,
) -> MultiplicityResult:
    """Nullspace dimension at ``W`` and ``W + 4``; :class:`WindowUnstable` if they differ."""
    if window is None:
        window = recommended_window(case, params, v_factor, w_factor)
    dims = window_dimensions(case, params, (window, window + WINDOW_STEP), v_factor, w_factor)
    stable = dims[0][1] == dims[1][1]
    if not stable and strict:
        raise WindowUnstable(f"dimension changes with the window: {dims}", dims=dims)
    return MultiplicityResult(case, params, v_factor, w_factor, dims[1][1], window, dims, stable)


@dataclass
class ComparisonReport:
    proportional: bool
    scalar: Fraction
    pairs_checked: int
    variant: str

    def to_json_obj(self) -> dict:
        return {
            "proportional": self.proportional,
            "scalar": format_rat(self.scalar),
            "pairs_checked": self.pairs_checked,
            "variant": self.variant,
        }


def compare_with_closed_form(case: GroupCase, params: Params, basis: SolutionBasis) -> ComparisonReport:
    """Check the single basis vector is an exact multiple of the closed-form table."""
    if basis.dimension != 1:
        raise MismatchError(f"expected a one-dimensional solution space, got {basis.dimension}")
    sol = basis.tables[0]
    ref = closed_form_table(case, params, basis.system.window)
    scalar = None
    for p in sorted(sol.values, key=lambda p: p.key()):
        if ref.values[p]:
            scalar = sol.values[p] / ref.values[p]
            break
    if scalar is None:
        raise MismatchError("closed-form table vanishes on the window")
    for p in sorted(sol.values, key=lambda p: p.key()):
        if sol.values[p] != scalar * ref.values[p]:
            raise MismatchError(f"first differing pair {p}", pair=p)
    return ComparisonReport(True, scalar, len(sol.values), ref.label)


# ---------------------------------------------------------------------------
# reference multiplicity tables (statements being reproduced)


def expected_principal_multiplicity(case: GroupCase, params: Params) -> int:
    return 2 if singular_set_membership(case, params).is_singular else 1


REAL_SUBQUOTIENT_EXPECTED = {
    True: {("F", "F"): 1, ("F", "T"): 0, ("T", "F"): 0, ("T", "T"): 1},
    False: {("F", "F"): 0, ("F", "T"): 0, ("T", "F"): 1, ("T", "T"): 0},
}
COMPLEX_FACTOR_KINDS = ("F", "Tplus", "Tminus", "T")
_COMPLEX_ONES = {
    True: {("F", "F"), ("Tplus", "Tplus"), ("Tminus", "Tminus"), ("T", "F"), ("T", "T")},
    False: {("T", "F")},
}


def expected_subquotient_multiplicity(case: GroupCase, i: int, j: int, v: str, w: str) -> int:
    """Tabulated ``m(V, W)`` between subquotients at reducibility indices ``(i, j)``."""
    if case.is_real:
        return REAL_SUBQUOTIENT_EXPECTED[i >= j and (i - j) % 2 == 0][(v, w)]
    return 1 if (v, w) in _COMPLEX_ONES[j <= i] else 0


def reducibility_params(case: GroupCase, i: int, j: int) -> Params:
    """``(-rho - i, -rho' - j)`` (real) or ``(-rho - 2i, -rho' - 2j)`` (complex)."""
    step = 1 if case.is_real else 2
    return Params(-case.rho - step * i, -case.rho_prime - step * j)


__all__ = [
    "COMPLEX_FACTOR_KINDS",
    "expected_principal_multiplicity",
    "expected_subquotient_multiplicity",
    "reducibility_params",
    "ComparisonReport",
    "ConstraintSystem",
    "FULL",
    "FULL_PRIME",
    "MultiplicityResult",
    "SolutionBasis",
    "assemble",
    "barrier_indices",
    "check_basis",
    "contains_table",
    "compare_with_closed_form",
    "echelonize",
    "multiplicity",
    "nullspace",
    "recommended_window",
    "restrict_vanishing",
    "window_dimensions",
]
