"""Floating-point oracle: product quadrature on spheres and the singular integral operator.

Two independent quadrature constructions live here.

``sphere_grid`` is an iterated product rule on ``S^{n-1}``: the last
coordinate ``t = cos(theta)`` is integrated by Gauss--Jacobi for the weight
``(1-t^2)^{(n-3)/2}`` and the remaining directions recursively, starting from
equispaced angles on the circle.  A grid of level ``L`` is exact for
polynomials of total degree ``<= 2L``.

``funk_hecke_apply`` evaluates

    A(r, r') f(y) = int_{S^{n-1}} |x - (y, 0)|^{-2(r'+rho')} |x_n|^{r+r'-1/2} f(x) dx

in polar coordinates around the singular point ``(y, 0)``.  Both algebraic
singularities -- at ``x = (y, 0)`` and along the equator ``x_n = 0`` --
become endpoint singularities of one-dimensional integrals whose exponents
are known in closed form, so they are absorbed into Gauss--Jacobi weights
and the remaining integrand is analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from . import _kernels
from .errors import ConvergenceError, DimensionError, ParameterError, ToleranceExceeded
from .harmonics import (
    HarmonicElement,
    embed_real,
    plancherel_norm_real,
    real_basis,
    restriction_norm_sq,
    restriction_norm_sq_alt,
)
from .spectral import funk_hecke_constant, funk_hecke_constant_trivial

MAX_LEVEL = 400


def sphere_area(n: int) -> float:
    """Surface area of ``S^{n-1}``."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def sphere_moment(exponents) -> float:
    """``int_{S^{n-1}} x^e dx`` in closed form."""
    e = list(exponents)
    if any(k % 2 for k in e):
        return 0.0
    num = 2.0 * math.prod(math.gamma((k + 1) / 2) for k in e)
    return num / math.gamma((sum(e) + len(e)) / 2)


# ---------------------------------------------------------------------------
# sphere grids


@dataclass(frozen=True)
class SphereGrid:
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    level: int

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray, backend: str | None = None) -> float:
        return _kernels.weighted_sum(np.asarray(values, dtype=float), self.weights, backend)

    def complex_nodes(self) -> np.ndarray:
        """Nodes of ``S^{2m-1}`` viewed as points ``z = x' + i x''`` of ``C^m``."""
        if self.n % 2:
            raise DimensionError("complex coordinates need an even real dimension")
        m = self.n // 2
        return self.nodes[:, :m] + 1j * self.nodes[:, m:]


def _jacobi_rule(count: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    t, w = roots_jacobi(count, a, b)
    return np.asarray(t), np.asarray(w)


@lru_cache(maxsize=64)
def _grid(n: int, level: int) -> SphereGrid:
    if n == 2:
        m = 2 * level + 1
        ang = 2 * math.pi * np.arange(m) / m
        return SphereGrid(2, np.column_stack([np.cos(ang), np.sin(ang)]), np.full(m, 2 * math.pi / m), level)
    lower = _grid(n - 1, level)
    half = (n - 3) / 2
    t, w = _jacobi_rule(level + 1, half, half)
    s = np.sqrt(np.clip(1 - t * t, 0.0, None))
    nodes = np.concatenate([np.column_stack([sk * lower.nodes, np.full(len(lower), tk)]) for tk, sk in zip(t, s)])
    weights = np.concatenate([wk * lower.weights for wk in w])
    return SphereGrid(n, nodes, weights, level)


def sphere_grid(n: int, level: int) -> SphereGrid:
    """Product grid on ``S^{n-1}``, exact for polynomials of degree ``<= 2 level``."""
    if not 3 <= n <= 6:
        raise DimensionError(f"sphere grids are provided for 3 <= n <= 6, got n={n}")
    if not 0 <= level <= MAX_LEVEL:
        raise DimensionError(f"level must lie in [0, {MAX_LEVEL}], got {level}")
    return _grid(n, level)


def circle_grid(level: int) -> SphereGrid:
    """Equispaced rule on ``S^1`` (used for ``H(R^2)`` norms when ``n = 3``)."""
    return _grid(2, level)


def _grid_any(n: int, level: int) -> SphereGrid:
    return circle_grid(level) if n == 2 else sphere_grid(n, level)


def _values(element: HarmonicElement, grid: SphereGrid, backend: str | None = None) -> np.ndarray:
    pts = grid.complex_nodes() if element.is_complex else grid.nodes
    return element(pts, backend)


def inner_product(f: HarmonicElement, g: HarmonicElement, grid: SphereGrid, backend: str | None = None) -> complex:
    vf, vg = _values(f, grid, backend), _values(g, grid, backend)
    prod = vf * np.conj(vg)
    re = _kernels.weighted_sum(np.ascontiguousarray(prod.real), grid.weights, backend)
    if np.iscomplexobj(prod):
        return complex(re, _kernels.weighted_sum(np.ascontiguousarray(prod.imag), grid.weights, backend))
    return re


def norm_sq(f: HarmonicElement, grid: SphereGrid, backend: str | None = None) -> float:
    return float(np.real(inner_product(f, f, grid, backend)))


def gram_matrix(elements: list[HarmonicElement], grid: SphereGrid, backend: str | None = None) -> np.ndarray:
    vals = [_values(e, grid, backend) for e in elements]
    m = len(vals)
    out = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            out[i, j] = np.sum(vals[i] * np.conj(vals[j]) * grid.weights)
            out[j, i] = np.conj(out[i, j])
    return out


def max_normalized_offdiagonal(elements: list[HarmonicElement], grid: SphereGrid) -> float:
    """``max_{i != j} |<e_i, e_j>| / (||e_i|| ||e_j||)``."""
    g = gram_matrix(elements, grid)
    d = np.sqrt(np.real(np.diag(g)))
    worst = 0.0
    for i in range(len(elements)):
        for j in range(len(elements)):
            if i != j:
                worst = max(worst, abs(g[i, j]) / (d[i] * d[j]))
    return worst


# ---------------------------------------------------------------------------
# the singular integral


@dataclass
class QuadratureReport:
    inputs: dict
    value: float
    reference: float | None
    rel_error: float | None
    refinements: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        out = {
            "inputs": self.inputs,
            "value": self.value,
            "reference": self.reference,
            "rel_error": self.rel_error,
            "refinements": self.refinements,
        }
        out.update(self.extra)
        return out


def check_convergence_region(n: int, r: float, rp: float) -> None:
    """Absolute convergence: ``r + r' > -1/2`` and ``r' - r < 1/2``."""
    if not r + rp > -0.5:
        raise ParameterError(f"r + r' = {r + rp} <= -1/2: divergent across x_n = 0")
    if not rp - r < 0.5:
        raise ParameterError(f"r' - r = {rp - r} >= 1/2: divergent at the kernel singularity")


def _frame(y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``Y = (y, 0)``, ``e_n`` and an orthonormal basis of their complement (columns)."""
    n = y.shape[0] + 1
    Y = np.append(y, 0.0)
    Y = Y / np.linalg.norm(Y)
    e = np.zeros(n)
    e[-1] = 1.0
    basis = np.column_stack([Y, e])
    # complement via a complete QR of the two fixed vectors
    q, _ = np.linalg.qr(np.column_stack([basis, np.eye(n)]), mode="reduced")
    U = q[:, 2:n]
    return Y, e, U


def _eta_rule(dim: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on ``S^{dim-1}`` (``dim = n - 2``)."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        ang = 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)]), np.full(count, 2 * math.pi / count)
    g = _grid(dim, max(count // 2, 1))
    return g.nodes, g.weights


def _singular_rule(count: int, length: float, left: float, right: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``int_0^L x^left (L-x)^right g(x) dx``."""
    t, w = _jacobi_rule(count, right, left)
    x = length * (1 + t) / 2
    return x, w * (length / 2) ** (left + right + 1)


def _fh_points(n: int, y: np.ndarray, s: float, a: float, counts: tuple[int, int, int]):
    n_theta, n_phi, n_eta = counts
    B = a + n - 2
    A = B - 2 * s
    theta, w_theta = _singular_rule(n_theta, math.pi, A, B)
    w_theta = w_theta * (np.sin(theta) / (theta * (math.pi - theta))) ** B * (2 * np.sin(theta / 2) / theta) ** (-2 * s)
    phi, w_phi = _singular_rule(n_phi, math.pi / 2, float(n - 3), a)
    rem = (np.cos(phi) / (math.pi / 2 - phi)) ** a
    if n > 3:
        rem = rem * (np.sin(phi) / phi) ** (n - 3)
    w_phi = w_phi * rem
    phi = np.concatenate([phi, math.pi - phi])
    w_phi = np.concatenate([w_phi, w_phi])
    eta, w_eta = _eta_rule(n - 2, n_eta)
    Y, e, U = _frame(y)
    # omega = cos(phi) e + sin(phi) U eta
    ueta = eta @ U.T  # (n_eta, n)
    omega = np.cos(phi)[:, None, None] * e[None, None, :] + np.sin(phi)[:, None, None] * ueta[None, :, :]
    omega = omega.reshape(-1, n)
    w_omega = (w_phi[:, None] * w_eta[None, :]).reshape(-1)
    pts = np.cos(theta)[:, None, None] * Y[None, None, :] + np.sin(theta)[:, None, None] * omega[None, :, :]
    wts = w_theta[:, None] * w_omega[None, :]
    return pts.reshape(-1, n), wts.reshape(-1)


def funk_hecke_apply(
    n: int,
    r: float,
    rp: float,
    psi: HarmonicElement | None,
    y,
    start: int = 8,
    tol: float = 1e-11,
    max_nodes: int = 512,
    backend: str | None = None,
) -> QuadratureReport:
    """Value of the singular integral at ``y`` with automatic node doubling.

    ``psi = None`` integrates ``f = 1``.  ``tol`` is the accepted relative
    change between successive refinements (measured against the larger of
    the value and the integral of ``|psi|``); exceeding it at ``max_nodes``
    raises :class:`ConvergenceError`.
    """
    if not 3 <= n <= 6:
        raise DimensionError(f"the oracle covers 3 <= n <= 6, got n={n}")
    check_convergence_region(n, r, rp)
    y = np.asarray(y, dtype=float)
    if y.shape != (n - 1,):
        raise DimensionError(f"y must lie in R^{n - 1}")
    y = y / np.linalg.norm(y)
    s = rp + (n - 2) / 2
    a = r + rp - 0.5
    history = []
    prev = None
    count = start
    while True:
        pts, wts = _fh_points(n, y, s, a, (count, count, max(2 * count, 4)))
        vals = np.ones(len(wts)) if psi is None else psi(pts, backend)
        value = _kernels.weighted_sum(vals, wts, backend)
        scale = _kernels.weighted_sum(np.abs(vals), wts, backend)
        history.append({"nodes": count, "value": value, "abs_integral": scale})
        if prev is not None and abs(value - prev) <= tol * max(abs(value), scale):
            break
        if count * 2 > max_nodes:
            raise ConvergenceError(f"no convergence up to {count} nodes per direction: history {history[-3:]}")
        prev = value
        count *= 2
    return QuadratureReport(
        inputs={"n": n, "r": r, "rp": rp, "y": y.tolist(), "psi": None if psi is None else psi.label},
        value=value,
        reference=None,
        rel_error=None,
        refinements=history,
        extra={"abs_integral": scale},
    )


def _sample_points(dim: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def verify_funk_hecke(
    n: int,
    alpha: int,
    alpha_p: int,
    r: float,
    rp: float,
    samples: int = 5,
    seed: int = 0,
    phi: HarmonicElement | None = None,
    backend: str | None = None,
) -> QuadratureReport:
    """Compare ``A(r,r') psi`` with ``c_{alpha,alpha'}(r,r') phi(y)`` at sample points ``y``.

    For even ``alpha - alpha'`` the report carries the worst relative error
    over samples with ``|phi(y)|`` at least a tenth of its maximum on the
    sample set; for odd parity the identity says the integral vanishes and
    the error is ``|value|`` divided by the integral of ``|psi|``.
    """
    if phi is None:
        phi = real_basis(n - 1, alpha_p)[0]
    psi = embed_real(phi, alpha)
    c = funk_hecke_constant(n, alpha, alpha_p, r, rp)
    ys = _sample_points(n - 1, 4 * samples, seed)
    phivals = phi(ys, backend)
    big = np.abs(phivals) >= 0.1 * np.max(np.abs(phivals)) if alpha_p else np.ones(len(ys), bool)
    chosen = np.nonzero(big)[0][:samples]
    worst = 0.0
    rows = []
    for k in chosen:
        rep = funk_hecke_apply(n, r, rp, psi, ys[k], backend=backend)
        ref = c * float(phivals[k])
        if (alpha - alpha_p) % 2:
            err = abs(rep.value) / rep.extra["abs_integral"]
        else:
            err = abs(rep.value - ref) / abs(ref)
        worst = max(worst, err)
        rows.append({"y": ys[k].tolist(), "value": rep.value, "reference": ref, "error": err, "refinements": rep.refinements})
    return QuadratureReport(
        inputs={"n": n, "alpha": alpha, "alpha_p": alpha_p, "r": r, "rp": rp, "samples": len(rows), "phi": phi.label},
        value=rows[0]["value"],
        reference=rows[0]["reference"],
        rel_error=worst,
        refinements=[row["refinements"] for row in rows],
        extra={"constant": c, "odd_parity": bool((alpha - alpha_p) % 2), "points": [{k: v for k, v in row.items() if k != "refinements"} for row in rows]},
    )


def verify_trivial_constant(n: int, r: float, rp: float, y=None) -> QuadratureReport:
    """``f = 1``: the integral equals ``c(r, r')`` for every ``y``."""
    if y is None:
        y = np.eye(n - 1)[0]
    rep = funk_hecke_apply(n, r, rp, None, y)
    ref = funk_hecke_constant_trivial(n, r, rp)
    rep.reference = ref
    rep.rel_error = abs(rep.value - ref) / abs(ref)
    return rep


# ---------------------------------------------------------------------------
# norm formulas


def verify_norm_formulas(n: int, alpha_max: int, tol: float = 1e-8, backend: str | None = None) -> QuadratureReport:
    """Plancherel and restriction-norm formulas against quadrature, all ``alpha' <= alpha <= alpha_max``."""
    if n not in (3, 4, 5):
        raise DimensionError("norm verification is provided for n in {3, 4, 5}")
    level = alpha_max + 2
    big = sphere_grid(n, level)
    small = _grid_any(n - 1, level)
    equator = np.column_stack([small.nodes, np.zeros(len(small))])
    rows = []
    worst = 0.0
    for alpha in range(alpha_max + 1):
        for alpha_p in range(alpha + 1):
            phi = real_basis(n - 1, alpha_p)[0]
            psi = embed_real(phi, alpha)
            nphi = small.integrate(phi(small.nodes, backend) ** 2, backend)
            npsi = big.integrate(psi(big.nodes, backend) ** 2, backend)
            planch = plancherel_norm_real(n, alpha, alpha_p)
            e1 = abs(npsi / nphi - planch) / planch
            rest_quad = small.integrate(psi(equator, backend) ** 2, backend) / npsi
            if (alpha - alpha_p) % 2:
                rest_ref = 0.0
                e2 = abs(rest_quad)
                e3 = 0.0
            else:
                rest_ref = restriction_norm_sq(n, alpha, alpha_p)
                e2 = abs(rest_quad - rest_ref) / rest_ref
                alt = restriction_norm_sq_alt(n, alpha, alpha_p)
                e3 = abs(alt - rest_ref) / rest_ref
            row = {
                "alpha": alpha,
                "alpha_p": alpha_p,
                "plancherel": planch,
                "plancherel_quad": npsi / nphi,
                "restriction": rest_ref,
                "restriction_quad": rest_quad,
                "errors": [e1, e2, e3],
            }
            rows.append(row)
            err = max(e1, e2, e3)
            worst = max(worst, err)
            if err > tol:
                raise ToleranceExceeded(f"norm formula off by {err:.3e} at (alpha, alpha')=({alpha},{alpha_p})", where=(alpha, alpha_p))
    return QuadratureReport(
        inputs={"n": n, "alpha_max": alpha_max, "level": level},
        value=worst,
        reference=0.0,
        rel_error=worst,
        refinements=[],
        extra={"rows": rows},
    )


__all__ = [
    "MAX_LEVEL",
    "QuadratureReport",
    "SphereGrid",
    "check_convergence_region",
    "circle_grid",
    "funk_hecke_apply",
    "gram_matrix",
    "inner_product",
    "max_normalized_offdiagonal",
    "norm_sq",
    "sphere_area",
    "sphere_grid",
    "sphere_moment",
    "verify_funk_hecke",
    "verify_norm_formulas",
    "verify_trivial_constant",
]
