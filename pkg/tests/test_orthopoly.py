from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from scipy.special import eval_gegenbauer, eval_jacobi

from sbo.orthopoly import PolyRat, gegenbauer, gegenbauer_value_at_zero, jacobi
from sbo.numerics import pochhammer

F = Fraction
LAMBDAS = [F(1, 2), F(1), F(3, 2), F(2), F(5, 2), F(1, 3)]


def test_gegenbauer_examples():
    assert list(gegenbauer(3, 1).coeffs) == [0, -4, 0, 8]
    assert gegenbauer(2, F(1, 2))(F(0)) == F(-1, 2)
    assert gegenbauer(0, F(7, 3)).coeffs == (F(1),)


def test_jacobi_first_degree():
    assert jacobi(1, 0, 0).coeffs == (F(0), F(1))


def test_negative_degree():
    with pytest.raises(ValueError):
        gegenbauer(-1, 1)
    with pytest.raises(ValueError):
        jacobi(-2, 0, 0)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_gegenbauer_parity_and_value_at_zero(lam):
    for m in range(11):
        p = gegenbauer(m, lam)
        assert p.compose_neg() == p.scale((-1) ** m)
        if m % 2:
            assert p(F(0)) == 0
        else:
            k = m // 2
            assert p(F(0)) == (-1) ** k * pochhammer(lam, k) / pochhammer(1, k)
        assert gegenbauer_value_at_zero(m, lam) == p(F(0))


@pytest.mark.parametrize("a, b", [(F(0), F(0)), (F(1, 2), F(-1, 2)), (F(2), F(3, 2)), (F(-1, 3), F(1))])
def test_jacobi_value_at_one(a, b):
    for m in range(11):
        assert jacobi(m, a, b)(F(1)) == pochhammer(a + 1, m) / pochhammer(1, m)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_gegenbauer_three_term_recurrence(lam):
    x = PolyRat([0, 1])
    for m in range(1, 10):
        lhs = gegenbauer(m + 1, lam).scale(m + 1)
        rhs = (x * gegenbauer(m, lam)).scale(2 * (m + lam)) - gegenbauer(m - 1, lam).scale(m + 2 * lam - 1)
        assert lhs == rhs


def test_against_scipy():
    xs = np.linspace(-0.95, 0.95, 17)
    for m in range(9):
        for lam in LAMBDAS:
            assert np.allclose(gegenbauer(m, lam)(xs), eval_gegenbauer(m, float(lam), xs), rtol=1e-11, atol=1e-12)
        for a, b in [(0.0, 0.0), (0.5, -0.5), (2.0, 1.5)]:
            assert np.allclose(jacobi(m, F(a), F(b))(xs), eval_jacobi(m, a, b, xs), rtol=1e-11, atol=1e-12)


def test_gegenbauer_roots_real_and_simple():
    for m in range(1, 9):
        p = gegenbauer(m, F(3, 2))
        roots = np.roots([float(c) for c in reversed(p.coeffs)])
        assert np.allclose(roots.imag, 0.0, atol=1e-9)
        real = np.sort(roots.real)
        assert np.all(np.abs(real) < 1)
        assert np.all(np.diff(real) > 1e-6)
