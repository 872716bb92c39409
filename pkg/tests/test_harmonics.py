from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from sbo.errors import DegreeError, EmptySpace, ParityError
from sbo.harmonics import (
    complex_basis,
    complex_dimension,
    constant,
    embed_complex,
    embed_real,
    multiply_coordinate_complex,
    multiply_coordinate_real,
    plancherel_norm_real,
    real_basis,
    real_dimension,
    restrict_equator,
    restriction_norm_sq,
    restriction_norm_sq_alt,
)
from sbo.polynomial import MPoly, laplacian_complex, laplacian_real, norm_squared_complex, norm_squared_real
from sbo.quadrature import gram_matrix, max_normalized_offdiagonal, norm_sq, sphere_grid

F = Fraction


def test_embed_constant():
    one = constant(2)
    e = embed_real(one, 0)
    assert np.allclose(e(np.array([[0.6, 0.8, 0.0], [0.0, 0.0, 1.0]])), 1.0)


def test_embed_real_special_values():
    e = embed_real(constant(2), 2)
    assert e(np.array([[0.0, 0.0, 1.0]]))[0] == pytest.approx(1.0)
    assert e(np.array([[1.0, 0.0, 0.0]]))[0] == pytest.approx(-0.5)


def test_embed_real_degree_check():
    phi = real_basis(2, 3)[0]
    with pytest.raises(DegreeError):
        embed_real(phi, 2)


def test_embed_complex_examples():
    one = constant(1, complex_=True)
    assert np.allclose(embed_complex(one, 0, 0)(np.array([[0.6, 0.8j]])), 1.0)
    e11 = embed_complex(one, 1, 1)
    z1 = np.exp(0.4j)
    assert e11(np.array([[z1, 0.0]]))[0] == pytest.approx(1.0)
    e10 = embed_complex(one, 1, 0)
    pts = np.array([[0.6, 0.8j], [0.28j, 0.96]])
    assert np.allclose(e10(pts), pts[:, 1])


def test_embed_complex_errors():
    phi = complex_basis(1, 2, 0)[0]
    with pytest.raises(DegreeError):
        embed_complex(phi, 1, 0)
    from sbo.harmonics import _complex

    zero = _complex(1, (1, 1), ("1,1",), MPoly(2))
    with pytest.raises(EmptySpace):
        embed_complex(zero, 1, 1)


@pytest.mark.parametrize("n, alpha, count", [(2, 1, 2), (3, 2, 5), (4, 0, 1), (5, 3, 30)])
def test_real_basis_counts(n, alpha, count):
    assert len(real_basis(n, alpha)) == count == real_dimension(n, alpha)


def test_circle_linear_span():
    polys = {b.poly for b in real_basis(2, 1)}
    assert polys == {MPoly.variable(2, 0), MPoly.variable(2, 1)}


@pytest.mark.parametrize("n, a1, a2, count", [(1, 2, 0, 1), (1, 1, 1, 0), (2, 1, 1, 3), (3, 2, 1, 15)])
def test_complex_basis_counts(n, a1, a2, count):
    basis = complex_basis(n, a1, a2)
    assert len(basis) == count
    if n > 1 or a1 * a2 == 0:
        assert complex_dimension(n, a1, a2) == count


def test_complex_base_monomial():
    (z2,) = complex_basis(1, 2, 0)
    assert z2.poly == MPoly(2, {(2, 0): 1})


def test_branching_completeness():
    for n in range(3, 6):
        for alpha in range(6):
            assert len(real_basis(n, alpha)) == sum(len(real_basis(n - 1, ap)) for ap in range(alpha + 1))


def test_real_basis_harmonic_and_homogeneous():
    for n in (3, 4):
        for alpha in range(5):
            for phi in real_basis(n, alpha):
                assert phi.poly.is_homogeneous(alpha)
                assert laplacian_real(phi.poly).is_zero()


def test_complex_basis_harmonic():
    for n in (2, 3):
        for a1 in range(3):
            for a2 in range(3):
                for phi in complex_basis(n, a1, a2):
                    assert laplacian_complex(phi.poly).is_zero()


def test_multiply_coordinate_examples():
    one = constant(2)
    plus, minus = multiply_coordinate_real(one, 0)
    assert plus == MPoly.variable(2, 0) and minus.is_zero()
    x1 = [b for b in real_basis(2, 1) if b.poly == MPoly.variable(2, 0)][0]
    plus, minus = multiply_coordinate_real(x1, 0)
    assert minus == MPoly.constant(2, F(1, 2))
    assert plus == MPoly.variable(2, 0, 2) - norm_squared_real(2).scale(F(1, 2))


def test_multiply_coordinate_real_identity():
    for n in (2, 3, 4):
        r2 = norm_squared_real(n)
        for alpha in range(5):
            for phi in real_basis(n, alpha):
                for j in range(n):
                    plus, minus = multiply_coordinate_real(phi, j)
                    assert (MPoly.variable(n, j) * phi.poly - plus - r2 * minus).is_zero()
                    assert laplacian_real(plus).is_zero()
                    assert laplacian_real(minus).is_zero()


def test_multiply_coordinate_complex_identity():
    for n in (1, 2, 3):
        r2 = norm_squared_complex(n)
        for a1 in range(3):
            for a2 in range(3):
                for phi in complex_basis(n, a1, a2):
                    for j in range(n):
                        for mode, var in (("z", j), ("zbar", n + j)):
                            plus, minus = multiply_coordinate_complex(phi, j, mode)
                            assert (MPoly.variable(2 * n, var) * phi.poly - plus - r2 * minus).is_zero()
                            assert laplacian_complex(plus).is_zero()
                            assert laplacian_complex(minus).is_zero()


def test_multiply_coordinate_complex_examples():
    (z,) = complex_basis(1, 1, 0)
    plus, minus = multiply_coordinate_complex(z, 0, "zbar")
    assert minus == MPoly.constant(2, 1)
    z1 = embed_complex(complex_basis(1, 1, 0)[0], 1, 0)
    plus, minus = multiply_coordinate_complex(z1, 0, "z")
    assert plus == MPoly.variable(4, 0, 2) and minus.is_zero()


def test_restriction_examples():
    assert restrict_equator(constant(3)) == MPoly.constant(2)
    one = constant(2)
    assert restrict_equator(embed_real(one, 1)).is_zero()
    assert restrict_equator(embed_real(one, 2)) == norm_squared_real(2).scale(F(-1, 2))


def test_restriction_parity():
    for n in (3, 4):
        for ap in range(4):
            for phi in real_basis(n - 1, ap):
                for alpha in range(ap, ap + 5):
                    vanishes = restrict_equator(embed_real(phi, alpha)).is_zero()
                    assert vanishes == ((alpha - ap) % 2 == 1)


def test_orthogonality():
    for n in (3, 4):
        grid = sphere_grid(n, 6)
        for alpha in range(5):
            assert max_normalized_offdiagonal(real_basis(n, alpha), grid) <= 1e-9
    cgrid = sphere_grid(4, 8)
    elements = [phi for a1 in range(3) for a2 in range(3) for phi in complex_basis(2, a1, a2)]
    gram = gram_matrix(elements, cgrid)
    d = np.sqrt(np.abs(np.diag(gram)))
    off = np.abs(gram) / np.outer(d, d) - np.eye(len(elements))
    assert np.max(np.abs(off)) <= 1e-9


def test_plancherel_examples():
    assert plancherel_norm_real(3, 0, 0) == pytest.approx(2.0, rel=1e-14)
    grid = sphere_grid(3, 6)
    e = embed_real(constant(2), 2)
    assert norm_sq(e, grid) / (2 * math.pi) == pytest.approx(plancherel_norm_real(3, 2, 0), rel=1e-12)


def test_plancherel_against_quadrature():
    for n in (3, 4, 5):
        grid, sub = sphere_grid(n, 7), sphere_grid(n - 1, 7) if n > 3 else None
        for alpha in range(6):
            for ap in range(alpha + 1):
                phi = real_basis(n - 1, ap)[0]
                base = norm_sq(phi, sub) if sub is not None else _circle_norm(phi)
                assert norm_sq(embed_real(phi, alpha), grid) / base == pytest.approx(
                    plancherel_norm_real(n, alpha, ap), rel=1e-8
                )


def _circle_norm(phi) -> float:
    theta = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    vals = phi(np.stack([np.cos(theta), np.sin(theta)], axis=1))
    return float(np.mean(vals**2) * 2 * math.pi)


def test_restriction_norm_examples():
    assert restriction_norm_sq(3, 0, 0) == pytest.approx(0.5, rel=1e-14)
    for n in (3, 4, 5):
        for ap in range(6):
            mu = ap + (n - 2) / 2
            expected = mu * math.gamma(0.5) * math.gamma(mu) / (math.pi * math.gamma(ap + (n - 1) / 2))
            assert restriction_norm_sq(n, ap, ap) == pytest.approx(expected, rel=1e-12)


def test_restriction_norm_rearrangement():
    for n in (3, 4, 5):
        for ap in range(8):
            for ell in range(8):
                a = ap + 2 * ell
                assert restriction_norm_sq(n, a, ap) == pytest.approx(restriction_norm_sq_alt(n, a, ap), rel=1e-12)


def test_restriction_norm_parity_error():
    with pytest.raises(ParityError):
        restriction_norm_sq(3, 3, 0)


def test_restriction_norm_asymptotics():
    for n in (3, 4, 5):
        for ap in range(41):
            for ell in range(41):
                ratio = restriction_norm_sq(n, ap + 2 * ell, ap) / ((1 + ap + ell) ** 0.5 * (1 + ell) ** -0.5)
                assert 0.1 <= ratio <= 10
