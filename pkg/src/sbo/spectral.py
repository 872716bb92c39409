"""Closed-form spectral functions, their renormalizations and derived constants.

All exact formulas go through Pochhammer products.  Functions named
``*_float`` are the double-precision counterparts used by the quadrature
oracle (where ``pi`` and Gamma at generic reals appear anyway).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import CalibrationError, NotRationalError, ParameterError, ParityError, PoleError, SupportError
from .lattice import (
    ComplexPair,
    GroupCase,
    Pair,
    Params,
    RealPair,
    all_rows,
    apply_row,
    real_index,
)
from .numerics import GammaArg, format_rat, gamma_product_limit, gamma_ratio_float, is_nonpositive_integer, pochhammer, rat

# ---------------------------------------------------------------------------
# tables


@dataclass
class SpectralTable:
    case: GroupCase
    params: Params | None
    window: int
    values: dict = field(default_factory=dict)
    label: str = ""

    def __getitem__(self, p: Pair) -> Fraction:
        return self.values[p]

    def get(self, p: Pair, default=Fraction(0)):
        return self.values.get(p, default)

    def pairs(self) -> list[Pair]:
        return sorted(self.values, key=lambda p: tuple(p))

    def support(self) -> list[Pair]:
        return [p for p in self.pairs() if self.values[p] != 0]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def scaled(self, c: Fraction) -> "SpectralTable":
        return SpectralTable(self.case, self.params, self.window, {p: c * v for p, v in self.values.items()}, self.label)

    def to_json_obj(self) -> dict:
        return {
            "case": {"family": self.case.family, "n": self.case.n},
            "params": self.params.as_json() if self.params else None,
            "window": self.window,
            "values": [[str(p), format_rat(self.values[p])] for p in self.pairs()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def make_table(case: GroupCase, params: Params | None, window: int, fn: Callable[[Pair], Fraction], label: str = "") -> SpectralTable:
    return SpectralTable(case, params, window, {p: fn(p) for p in case.pairs(window)}, label)


def residuals(case: GroupCase, params: Params, table: SpectralTable | dict) -> list[tuple[Pair, str, Fraction]]:
    """Evaluate every in-window relation row on ``table``; returns the nonzero ones."""
    values = table.values if isinstance(table, SpectralTable) else table
    window = table.window if isinstance(table, SpectralTable) else max(
        (p.a if case.is_real else max(p.a1, p.a2)) for p in values
    )
    out = []
    for p, d, row in all_rows(case, params, window):
        v = apply_row(row, values)
        if v:
            out.append((p, d, v))
    return out


# ---------------------------------------------------------------------------
# real case


def _require_real(case: GroupCase) -> None:
    if not case.is_real:
        raise ParameterError("real-case formula called with a complex case")


def _require_complex(case: GroupCase) -> None:
    if case.is_real:
        raise ParameterError("complex-case formula called with a real case")


def _real_pair(case: GroupCase, pair: Pair) -> RealPair:
    if not case.contains(pair):
        raise ParityError(f"{pair} is not an even-parity lattice pair")
    return pair


def _real_core(case: GroupCase, r: Fraction, rp: Fraction, a: int, ap: int, k: int) -> Fraction:
    """``2^{4k} (A)_k (-l)_k (C)_k (D)_k / (2k)!``."""
    n = case.n
    ell = (a - ap) // 2
    return (
        Fraction(16**k, math.factorial(2 * k))
        * pochhammer(Fraction(a + ap + n - 2, 2), k)
        * pochhammer(-ell, k)
        * pochhammer((2 * r + 2 * rp + 1) / 4, k)
        * pochhammer((2 * r - 2 * rp + 1) / 4, k)
    )


def t_real(case: GroupCase, params: Params, pair: Pair) -> Fraction:
    """Spectral function ``t_{a,a'}(r, r')``, normalized by ``t_{0,0} = 1``."""
    _require_real(case)
    pair = _real_pair(case, pair)
    r, rp = params.r, params.rp
    a, ap = pair
    x = r + case.rho
    total = Fraction(0)
    for k in range((a - ap) // 2 + 1):
        num = _real_core(case, r, rp, a, ap, k)
        if not num:
            continue
        den = pochhammer(x, ap + 2 * k)
        if not den:
            raise PoleError(f"(r+rho)_{ap + 2 * k} = 0 in summand k={k}", k=k)
        total += num / den
    return pochhammer(rp + case.rho_prime, ap) * total


def _reciprocal_gamma(x: Fraction) -> Fraction:
    if x.denominator != 1:
        raise NotRationalError(f"1/Gamma({format_rat(x)}) is not rational")
    if x <= 0:
        return Fraction(0)
    return Fraction(1, math.factorial(int(x) - 1))


def t1_real(case: GroupCase, params: Params, pair: Pair) -> Fraction:
    """``t / Gamma(r + rho)``: entire in ``(r, r')``.

    Exact whenever ``r + rho`` is an integer (the Gamma values are then
    rational); elsewhere the value is a transcendental multiple of ``t`` and
    :class:`NotRationalError` is raised.
    """
    _require_real(case)
    pair = _real_pair(case, pair)
    r, rp = params.r, params.rp
    a, ap = pair
    x = r + case.rho
    total = Fraction(0)
    for k in range((a - ap) // 2 + 1):
        num = _real_core(case, r, rp, a, ap, k)
        if num:
            total += num * _reciprocal_gamma(x + ap + 2 * k)
    return pochhammer(rp + case.rho_prime, ap) * total


def t2_real(case: GroupCase, r, j: int, pair: Pair) -> Fraction:
    """Renormalization along ``r' = -rho' - j``, evaluated at ``r = -rho - i``.

    Each summand carries ``Gamma(D + k) / Gamma(r + rho + a' + 2k)`` with
    ``D = (2r+2j+n-1)/4``; coincident poles are resolved by the residue limit
    along ``r -> r + eps``.
    """
    _require_real(case)
    pair = _real_pair(case, pair)
    r = rat(r)
    i = real_index(case, r)
    if i is None:
        raise ParameterError("t2 is provided exactly only at r = -rho - i, i natural")
    if j < 0:
        raise ParameterError("j must be natural")
    rp = -case.rho_prime - j
    n = case.n
    a, ap = pair
    ell = (a - ap) // 2
    pre = pochhammer(-j, ap)
    if not pre:
        return Fraction(0)
    d = (2 * r + 2 * j + n - 1) / 4
    total = Fraction(0)
    for k in range(ell + 1):
        core = (
            Fraction(16**k, math.factorial(2 * k))
            * pochhammer(Fraction(a + ap + n - 2, 2), k)
            * pochhammer(-ell, k)
            * pochhammer((2 * r + 2 * rp + 1) / 4, k)
        )
        if not core:
            continue
        ratio = gamma_product_limit(
            [GammaArg(d + k, Fraction(1, 2))], [GammaArg(r + case.rho + ap + 2 * k, Fraction(1))]
        )
        total += core * ratio
    return pre * total


def t3_real(case: GroupCase, r, N: int, pair: Pair) -> Fraction:
    """Renormalization along ``r' + rho' = r + rho + 2N``; a polynomial in ``r``."""
    _require_real(case)
    pair = _real_pair(case, pair)
    if N < 0:
        raise ParameterError("N must be natural")
    r = rat(r)
    return _t3_generic(case.n, r, N, pair.a, pair.ap, case.rho)


def _rising(x, k: int):
    out = 1 if not isinstance(x, float) else 1.0
    for j in range(k):
        out = out * (x + j)
    return out


def _t3_generic(n: int, r, N: int, a: int, ap: int, rho):
    ell = (a - ap) // 2
    total = 0
    half = Fraction(1, 2) if isinstance(r, Fraction) else 0.5
    for k in range(min(N, ell) + 1):
        c = (
            Fraction(16**k, math.factorial(2 * k))
            * pochhammer(-N, k)
            * pochhammer(Fraction(a + ap + n - 2, 2), k)
            * pochhammer(-ell, k)
        )
        if not c:
            continue
        if not isinstance(r, Fraction):
            c = float(c)
        total = total + c * _rising(r + N + half, k) * _rising(r + rho + ap + 2 * k, 2 * N - 2 * k)
    return total


def t3_real_float(n: int, r: float, N: int, a: int, ap: int) -> float:
    return float(_t3_generic(n, float(r), N, a, ap, (n - 1) / 2))


def t_real_float(n: int, r: float, rp: float, a: int, ap: int) -> float:
    """Double-precision evaluation of the Pochhammer form of ``t``."""
    rho, rhop = (n - 1) / 2, (n - 2) / 2
    ell = (a - ap) // 2
    total = 0.0
    for k in range(ell + 1):
        num = (
            16.0**k
            / math.factorial(2 * k)
            * _rising((a + ap + n - 2) / 2, k)
            * _rising(-ell * 1.0, k)
            * _rising((2 * r + 2 * rp + 1) / 4, k)
            * _rising((2 * r - 2 * rp + 1) / 4, k)
        )
        if num == 0.0:
            continue
        den = _rising(r + rho, ap + 2 * k)
        if den == 0.0:
            raise PoleError(f"pole in summand k={k}", k=k)
        total += num / den
    return _rising(rp + rhop, ap) * total


# ---------------------------------------------------------------------------
# complex case

PRINTED_GAMMA = Fraction(2)


def _complex_pair(case: GroupCase, pair: Pair) -> ComplexPair:
    if not case.contains(pair):
        raise ParameterError(f"{pair} is not a lattice pair for {case}")
    return pair


def t_complex(case: GroupCase, params: Params, pair: Pair, gamma: Fraction | int = 1) -> Fraction:
    """Reduced rational form of the complex spectral function with prefactor ``gamma^k``.

    ``gamma = 2`` is the formula as printed; ``gamma = 1`` is the variant that
    satisfies all four relations (see :func:`calibrate_complex`).
    """
    _require_complex(case)
    pair = _complex_pair(case, pair)
    gamma = rat(gamma)
    n = case.n
    r, rp = params.r, params.rp
    p, q1, q2 = pair.reduced
    m = (p - q1 - q2) // 2
    a = (rp + n - 1) / 2
    b = (r + n) / 2
    head = pochhammer(a, q1) * pochhammer(a, q2)
    total = Fraction(0)
    for k in range(m + 1):
        num = (
            gamma**k
            * pochhammer(-m, k)
            * pochhammer(Fraction(p + q1 + q2, 2) + n - 1, k)
            * pochhammer((r - rp + 1) / 2, k)
            * pochhammer((rp + r + 1) / 2, k)
        )
        if not num or not head:
            continue
        den = Fraction(math.factorial(k) ** 2) * pochhammer(b, q1 + k) * pochhammer(b, q2 + k)
        if not den:
            raise PoleError(f"((r+n)/2)-Pochhammer vanishes in summand k={k}", k=k)
        total += num / den
    return head * total


def t_complex_closed(case: GroupCase, params: Params, pair: Pair) -> Fraction:
    """The complex closed form exactly as printed (prefactor ``2^k``)."""
    return t_complex(case, params, pair, PRINTED_GAMMA)


_CALIBRATED: dict = {}


def t_complex_corrected(case: GroupCase, params: Params, pair: Pair) -> Fraction:
    """Complex closed form with the calibrated ``gamma^k`` prefactor."""
    gamma = _CALIBRATED.get("gamma")
    if gamma is None:
        gamma = calibrate_complex().gamma
    return t_complex(case, params, pair, gamma)


@dataclass
class CalibrationReport:
    gamma: Fraction
    window: int
    n: int
    oracle: dict
    printed: dict
    corrected: dict
    printed_residuals: list
    corrected_residuals: list

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "window": self.window,
            "params": {"r": "0", "rp": "0"},
            "printed_prefactor": "2^k",
            "fitted_prefactor": f"{format_rat(self.gamma)}^k",
            "pairs": [
                {
                    "pair": str(p),
                    "reduced": list(p.reduced),
                    "oracle": format_rat(self.oracle[p]),
                    "printed": format_rat(self.printed[p]),
                    "corrected": format_rat(self.corrected[p]),
                }
                for p in sorted(self.oracle, key=lambda p: p.key())
            ],
            "printed_residuals": [[str(p), d, format_rat(v)] for p, d, v in self.printed_residuals],
            "corrected_residuals": [[str(p), d, format_rat(v)] for p, d, v in self.corrected_residuals],
        }


def calibrate_complex(n: int = 2, window: int = 4, r: Fraction | int = 0, rp: Fraction | int = 0) -> CalibrationReport:
    """Fit the single ``gamma^k`` prefactor against the exact solver oracle.

    The oracle is the (one-dimensional) nullspace of the full relation system
    on the window, normalized by ``t_{(0,0),(0,0)} = 1``.  ``gamma`` is read
    off the first pair whose sum has exactly two terms, then checked on every
    pair and against every relation row.
    """
    from .solver import assemble, nullspace  # local import: solver depends on this module

    case = GroupCase("complex", n)
    params = Params(r, rp)
    basis = nullspace(assemble(case, params, window))
    if basis.dimension != 1:
        raise CalibrationError(f"oracle nullspace has dimension {basis.dimension}, expected 1")
    vec = basis.tables[0]
    origin = ComplexPair(0, 0, 0, 0)
    oracle = {p: v / vec[origin] for p, v in vec.values.items()}

    gamma = None
    for p in sorted(oracle, key=lambda p: p.key()):
        m = (p.p - p.q1 - p.q2) // 2
        if m != 1:
            continue
        t0 = t_complex(case, params, p, 0)
        t1 = t_complex(case, params, p, 1) - t0
        if t1:
            gamma = (oracle[p] - t0) / t1
            break
    if gamma is None:
        raise CalibrationError("no pair in the window determines the prefactor")
    printed = {p: t_complex(case, params, p, PRINTED_GAMMA) for p in oracle}
    corrected = {p: t_complex(case, params, p, gamma) for p in oracle}
    bad = [p for p in oracle if corrected[p] != oracle[p]]
    if bad:
        raise CalibrationError(f"gamma={gamma} does not reproduce the oracle at {bad[0]}")
    table_p = SpectralTable(case, params, window, printed)
    table_c = SpectralTable(case, params, window, corrected)
    report = CalibrationReport(
        gamma=gamma,
        window=window,
        n=n,
        oracle=oracle,
        printed=printed,
        corrected=corrected,
        printed_residuals=residuals(case, params, table_p),
        corrected_residuals=residuals(case, params, table_c),
    )
    if report.corrected_residuals:
        raise CalibrationError("fitted variant leaves nonzero relation residuals")
    _CALIBRATED.setdefault("gamma", gamma)
    return report


def t_plus_complex(case: GroupCase, i: int, j: int, pair: Pair, gamma: Fraction | int | None = None) -> Fraction:
    """The renormalized family at ``(r, r') = (-rho-2i, -rho'-2j)``, defined on ``a2 <= i``."""
    _require_complex(case)
    if not 0 <= j <= i:
        raise ParameterError("t_plus needs 0 <= j <= i")
    pair = _complex_pair(case, pair)
    if pair.a2 > i:
        raise SupportError(f"{pair} lies outside the support a2 <= {i}")
    if gamma is None:
        gamma = _CALIBRATED.get("gamma") or calibrate_complex().gamma
    gamma = rat(gamma)
    n = case.n
    p, q1, q2 = pair.reduced
    m = (p - q1 - q2) // 2
    head = pochhammer(-j, q2)
    if not head:
        return Fraction(0)
    total = Fraction(0)
    for k in range(min(m, i - j) + 1):
        num = (
            gamma**k
            * pochhammer(-m, k)
            * pochhammer(Fraction(p + q1 + q2, 2) + n - 1, k)
            * pochhammer(k + q1 - i, i - j - k)
            * pochhammer(j - i, k)
            * pochhammer(1 - n - i - j, k)
        )
        if not num:
            continue
        den = Fraction(math.factorial(k) ** 2) * pochhammer(-i, q2 + k)
        if not den:
            raise PoleError(f"(-i)_(q2+k) vanishes in summand k={k}", k=k)
        total += num / den
    return head * total


def t3_complex(case: GroupCase, r, N: int, pair: Pair, gamma: Fraction | int | None = None) -> Fraction:
    """``Gamma((r'+rho')/2)^2 / Gamma((r+rho)/2)^2 * t`` on ``r' + rho' = r + rho + 2N``."""
    _require_complex(case)
    pair = _complex_pair(case, pair)
    if gamma is None:
        gamma = _CALIBRATED.get("gamma") or calibrate_complex().gamma
    gamma = rat(gamma)
    r = rat(r)
    n = case.n
    p, q1, q2 = pair.reduced
    m = (p - q1 - q2) // 2
    b = (r + n) / 2
    total = Fraction(0)
    for k in range(min(m, N) + 1):
        num = (
            gamma**k
            * pochhammer(-m, k)
            * pochhammer(Fraction(p + q1 + q2, 2) + n - 1, k)
            * pochhammer(-N, k)
            * pochhammer(r + N + 1, k)
            * pochhammer(b + q1 + k, N - k)
            * pochhammer(b + q2 + k, N - k)
        )
        total += num / (math.factorial(k) ** 2)
    return total


# ---------------------------------------------------------------------------
# constants


def funk_hecke_constant(n: int, a: int, ap: int, r: float, rp: float) -> float:
    """Eigenvalue ``c_{a,a'}(r, r')`` of the singular integral operator on ``E(a; a')``."""
    if not 0 <= ap <= a:
        raise ParameterError("need 0 <= a' <= a")
    if (a - ap) % 2:
        return 0.0
    C = (2 * r + 2 * rp + 1) / 4
    D = (2 * r - 2 * rp + 1) / 4
    for x in (C, D):
        if x <= 0 and float(x).is_integer():
            raise PoleError(f"Gamma({x}) pole in the Funk-Hecke constant")
    rho = (n - 1) / 2
    # t / Gamma(r + rho) assembled term by term so poles of Gamma(r+rho) cancel
    t_over_gamma = _t1_real_float(n, r, rp, a, ap)
    pref = 2.0 ** (a - ap + r - rp + 0.5) * math.pi ** ((n - 1) / 2) / math.factorial(a - ap)
    gam = gamma_ratio_float([(a + ap + n - 2) / 2, C, D], [(1 + ap - a) / 2, ap + (n - 2) / 2])
    del rho
    return pref * gam * t_over_gamma


def _t1_real_float(n: int, r: float, rp: float, a: int, ap: int) -> float:
    rho, rhop = (n - 1) / 2, (n - 2) / 2
    ell = (a - ap) // 2
    total = 0.0
    for k in range(ell + 1):
        num = (
            16.0**k
            / math.factorial(2 * k)
            * _rising((a + ap + n - 2) / 2, k)
            * _rising(-float(ell), k)
            * _rising((2 * r + 2 * rp + 1) / 4, k)
            * _rising((2 * r - 2 * rp + 1) / 4, k)
        )
        if num:
            total += num * gamma_ratio_float([], [r + rho + ap + 2 * k])
    return _rising(rp + rhop, ap) * total


def funk_hecke_constant_trivial(n: int, r: float, rp: float) -> float:
    """``c(r, r')`` for ``f = 1``."""
    return (
        2.0 ** (r - rp + 0.5)
        * math.pi ** ((n - 2) / 2)
        * gamma_ratio_float([(2 * r + 2 * rp + 1) / 4, (2 * r - 2 * rp + 1) / 4], [r + (n - 1) / 2])
    )


def unitary_weight(case: GroupCase, r: float, degree: int, side: str = "G") -> float:
    """``b_a = Gamma(rho - r + a) / Gamma(rho + r + a)`` (``rho'`` on the ``G'`` side)."""
    _require_real(case)
    rho = float(case.rho if side == "G" else case.rho_prime)
    return gamma_ratio_float([rho - r + degree], [rho + r + degree])


@dataclass
class BoundednessProfile:
    n: int
    r: float
    rp: float
    N: int
    ap_max: int
    l_max: int
    normalized: list[float]
    sup: float
    argsup: int

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "rp": self.rp,
            "N": self.N,
            "ap_max": self.ap_max,
            "l_max": self.l_max,
            "sup": self.sup,
            "argsup": self.argsup,
            "normalized": self.normalized,
        }


def boundedness_profile(n: int, r: float, N: int, ap_max: int, l_max: int) -> BoundednessProfile:
    """Normalized partial sums
    ``(1+a')^{-2r'} sum_{l <= l_max} t3_{a'+2l,a'}^2 (1+a'+l)^{1/2+2r} (1+l)^{-1/2}``
    with ``r' = r + 1/2 + 2N``.
    """
    rho = (n - 1) / 2
    if N < 0:
        raise ParameterError("N must be natural")
    on_points = float(-rho - r).is_integer() and -rho - r >= 0
    if not (-rho < r < 0 or on_points):
        raise ParameterError(f"r={r} outside (-rho, 0) and not of the form -rho - i")
    rp = r + 0.5 + 2 * N
    if rp >= 0:
        raise ParameterError(f"r'={rp} = r + 1/2 + 2N is not negative: outside D(r)")
    normalized = []
    for ap in range(ap_max + 1):
        s = 0.0
        for ell in range(l_max + 1):
            t = t3_real_float(n, r, N, ap + 2 * ell, ap)
            s += t * t * (1 + ap + ell) ** (0.5 + 2 * r) / (1 + ell) ** 0.5
        normalized.append(s / (1 + ap) ** (2 * rp))
    sup = max(normalized)
    return BoundednessProfile(n, r, rp, N, ap_max, l_max, normalized, sup, normalized.index(sup))


def growth_ratio(case: GroupCase, params: Params, window: int, power: int = 8) -> float:
    """``max |t_{a,a'}| / (1 + a + a')^power`` over the window (real case)."""
    worst = 0.0
    for p in case.pairs(window):
        t = abs(float(t_real(case, params, p)))
        worst = max(worst, t / (1 + p.a + p.ap) ** power)
    return worst


def closed_form_table(case: GroupCase, params: Params, window: int) -> SpectralTable:
    if case.is_real:
        return make_table(case, params, window, lambda p: t_real(case, params, p), "t")
    return make_table(case, params, window, lambda p: t_complex_corrected(case, params, p), "t_corrected")


def support_predicate_t2(pair: Pair, j: int) -> bool:
    return pair.ap <= j


def iter_generic_real_params(
    seed: int, count: int, bound: int = 7, case: GroupCase | None = None
) -> Iterable[Params]:
    """``count`` distinct seeded rational points with numerators/denominators bounded by ``bound``.

    With ``case`` given, points where ``r + rho`` is a non-positive integer
    (poles of the closed form) are rejected.
    """
    from random import Random

    rng = Random(seed)
    seen: set[Params] = set()
    while len(seen) < count:
        r = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        rp = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        P = Params(r, rp)
        if P in seen:
            continue
        if case is not None and is_nonpositive_integer(r + case.rho):
            continue
        seen.add(P)
        yield P


__all__ = [
    "BoundednessProfile",
    "CalibrationReport",
    "SpectralTable",
    "boundedness_profile",
    "calibrate_complex",
    "closed_form_table",
    "funk_hecke_constant",
    "funk_hecke_constant_trivial",
    "growth_ratio",
    "make_table",
    "residuals",
    "t1_real",
    "t2_real",
    "t3_complex",
    "t3_real",
    "t3_real_float",
    "t_complex",
    "t_complex_closed",
    "t_complex_corrected",
    "t_plus_complex",
    "t_real",
    "t_real_float",
    "unitary_weight",
]
