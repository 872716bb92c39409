from __future__ import annotations

from fractions import Fraction

import pytest

from sbo.errors import MismatchError, ParameterError, WindowTooSmall, WindowUnstable
from sbo.lattice import ComplexPair, CompositionFactor, GroupCase, Params, RealPair, apply_row, diagonal_row
from sbo.solver import (
    FULL,
    FULL_PRIME,
    ConstraintSystem,
    assemble,
    check_basis,
    compare_with_closed_form,
    contains_table,
    echelonize,
    expected_principal_multiplicity,
    multiplicity,
    nullspace,
    recommended_window,
    reducibility_params,
    restrict_vanishing,
    window_dimensions,
)
from sbo.spectral import SpectralTable, t1_real, t_real

F = Fraction
REAL3, REAL4 = GroupCase("real", 3), GroupCase("real", 4)
CPLX2 = GroupCase("complex", 2)


def fac(kind, i, side="G"):
    return CompositionFactor(kind, i, side)


def test_assemble_unknown_counts():
    sys_ = assemble(REAL3, Params(F(1, 3), F(1, 5)), 10, FULL, FULL_PRIME)
    assert len(sys_.unknowns) == 36
    sys_ = assemble(CPLX2, Params(F(1, 3), F(1, 5)), 4, FULL, FULL_PRIME)
    assert len(sys_.unknowns) == len(CPLX2.pairs(4))
    summary = sys_.summary()
    assert summary["unknowns"] == len(sys_.unknowns) and summary["rows"] == len(sys_.rows)


def test_assemble_finite_factor_support():
    P = Params(-REAL3.rho - 2, F(-1, 2))
    sys_ = assemble(REAL3, P, 10, fac("F", 2), FULL_PRIME)
    assert sys_.unknowns and all(p.a <= 2 for p in sys_.unknowns)


def test_assemble_errors():
    P = Params(-REAL3.rho - 8, F(-1, 2))
    with pytest.raises(WindowTooSmall):
        assemble(REAL3, P, 10, FULL, FULL_PRIME)
    with pytest.raises(ParameterError):
        assemble(REAL3, Params(F(1, 3), F(1, 5)), 10, fac("F", 2), FULL_PRIME)
    with pytest.raises(ParameterError):
        assemble(REAL3, Params(-1, F(-1, 2)), 10, FULL_PRIME, FULL_PRIME)


def test_nullspace_without_rows():
    sys_ = ConstraintSystem(REAL3, Params(0, 0), 4, FULL, FULL_PRIME, REAL3.pairs(4), [])
    assert nullspace(sys_).dimension == len(REAL3.pairs(4))


@pytest.mark.parametrize("r, rp, dim", [(F(1, 3), F(1, 5), 1), (F(-1), F(-1, 2), 2), (F(-2), F(-1, 2), 1)])
def test_nullspace_dimension(r, rp, dim):
    basis = nullspace(assemble(REAL3, Params(r, rp), 12, FULL, FULL_PRIME))
    assert basis.dimension == dim
    check_basis(basis)


def test_echelonize_rank():
    rows = [{0: 1, 1: 2}, {0: 2, 1: 4}, {1: 3, 2: 1}]
    assert len(echelonize(rows)) == 2


def test_nullspace_is_reduced_and_deterministic():
    P = Params(-1, F(-1, 2))
    a = nullspace(assemble(REAL3, P, 12, FULL, FULL_PRIME))
    b = nullspace(assemble(REAL3, P, 12, FULL, FULL_PRIME))
    assert a.to_json_obj() == b.to_json_obj()
    unknowns = a.system.unknowns
    pivots = []
    for t in a.tables:
        lead = next(p for p in unknowns if t.values[p])
        assert t.values[lead] == 1
        pivots.append(lead)
    for t, lead in zip(a.tables, pivots):
        for other in pivots:
            if other != lead:
                assert t.values[other] == 0


@pytest.mark.parametrize(
    "case, v, w, params, expected",
    [
        (REAL3, fac("T", 0), fac("F", 1, "G'"), reducibility_params(REAL3, 0, 1), 1),
        (CPLX2, fac("Tplus", 1), fac("Tplus", 0, "G'"), reducibility_params(CPLX2, 1, 0), 1),
        (CPLX2, fac("Tplus", 0), fac("Tplus", 1, "G'"), reducibility_params(CPLX2, 0, 1), 0),
    ],
)
def test_multiplicity_examples(case, v, w, params, expected):
    assert multiplicity(case, params, v, w).multiplicity == expected


def test_finite_into_quotient_vanishes():
    for i in range(4):
        for j in range(4):
            P = reducibility_params(REAL3, i, j)
            assert multiplicity(REAL3, P, fac("F", i), fac("T", j, "G'")).multiplicity == 0


def test_principal_series_examples():
    for r, rp, m, label in [(F(-1), F(-1, 2), 2, "L_even(0,0)"), (F(-2), F(-1, 2), 1, "L_odd(1,0)")]:
        res = multiplicity(REAL3, Params(r, rp))
        assert res.multiplicity == m and res.stable
        assert res.to_json_obj()["set"] == label
    res = multiplicity(CPLX2, Params(-2, -1))
    assert res.multiplicity == 2 == expected_principal_multiplicity(CPLX2, Params(-2, -1))


def test_window_stability_three_increments():
    for P in (Params(F(1, 3), F(2, 7)), reducibility_params(REAL3, 2, 0), reducibility_params(REAL3, 3, 0)):
        w0 = recommended_window(REAL3, P)
        dims = window_dimensions(REAL3, P, [w0, w0 + 4, w0 + 8, w0 + 12])
        assert len({d for _, d in dims}) == 1


def test_minimum_windows_already_stable():
    for i in range(4):
        for j in range(4):
            P = reducibility_params(REAL3, i, j)
            w0 = max(i, j) + 4
            dims = window_dimensions(REAL3, P, [w0, w0 + 4, w0 + 8])
            assert len({d for _, d in dims}) == 1


def test_window_unstable_reported(monkeypatch):
    import sbo.solver as solver

    monkeypatch.setattr(solver, "window_dimensions", lambda *a, **k: [(10, 3), (14, 2)])
    with pytest.raises(WindowUnstable):
        multiplicity(REAL3, Params(F(1, 3), F(1, 5)))
    res = multiplicity(REAL3, Params(F(1, 3), F(1, 5)), strict=False)
    assert not res.stable and res.multiplicity == 2


def test_l_odd_forced_vanishing():
    for i, j in [(1, 0), (2, 1), (3, 0), (3, 2)]:
        P = reducibility_params(REAL3, i, j)
        basis = nullspace(assemble(REAL3, P, recommended_window(REAL3, P), FULL, FULL_PRIME))
        assert basis.dimension == 1
        (t,) = basis.tables
        for p, v in t.values.items():
            if p.a <= i or p.ap > j:
                assert v == 0
        assert not t.is_zero()


def test_diagonal_seeding():
    for case, P in [(REAL3, Params(F(1, 3), F(1, 5))), (REAL3, Params(-1, F(-1, 2))), (CPLX2, Params(F(1, 3), F(1, 5)))]:
        basis = nullspace(assemble(case, P, 8, FULL, FULL_PRIME))
        for t in basis.tables:
            if case.is_real:
                rows = [diagonal_row(case, P, a) for a in range(8)]
            else:
                rows = [diagonal_row(case, P, (q1, q2), w) for q1 in range(8) for q2 in range(8) for w in (1, 2)]
            for row in rows:
                if all(case.contains(p) and case.in_window(p, 8) for p in row):
                    assert apply_row(row, t.values) == 0


def test_compare_examples():
    basis = nullspace(assemble(REAL3, Params(F(1, 3), F(1, 5)), 10, FULL, FULL_PRIME))
    report = compare_with_closed_form(REAL3, basis.system.params, basis)
    assert report.proportional and report.scalar == basis.tables[0].values[RealPair(0, 0)]
    basis = nullspace(assemble(REAL4, Params(0, 0), 10, FULL, FULL_PRIME))
    assert compare_with_closed_form(REAL4, Params(0, 0), basis).proportional
    basis = nullspace(assemble(CPLX2, Params(0, 0), 6, FULL, FULL_PRIME))
    report = compare_with_closed_form(CPLX2, Params(0, 0), basis)
    assert report.variant == "t_corrected"


def test_compare_mismatch():
    P = Params(F(1, 3), F(1, 5))
    basis = nullspace(assemble(REAL3, P, 6, FULL, FULL_PRIME))
    t = basis.tables[0]
    bad = dict(t.values)
    bad[RealPair(2, 2)] += 1
    basis.tables[0] = SpectralTable(t.case, t.params, t.window, bad)
    with pytest.raises(MismatchError) as info:
        compare_with_closed_form(REAL3, P, basis)
    assert info.value.pair == RealPair(2, 2)


def test_l_even_basis_structure():
    for i, j in [(0, 0), (2, 0), (3, 1)]:
        P = reducibility_params(REAL3, i, j)
        basis = nullspace(assemble(REAL3, P, recommended_window(REAL3, P), FULL, FULL_PRIME))
        assert basis.dimension == 2
        small = restrict_vanishing(basis, lambda p: p.ap > j)
        vanish = restrict_vanishing(basis, lambda p: p.a <= i)
        assert len(small) == 1 and len(vanish) == 1
        t1_table = SpectralTable(REAL3, P, basis.system.window, {p: t1_real(REAL3, P, p) for p in basis.system.unknowns})
        assert t1_table.is_zero()
        t_generic = SpectralTable(
            REAL3,
            P,
            basis.system.window,
            {p: t_real(REAL3, Params(F(1, 3), F(1, 5)), p) for p in basis.system.unknowns},
        )
        assert not contains_table(basis, t_generic)
