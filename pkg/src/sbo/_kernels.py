"""Hot floating-point loops of the quadrature oracle.

Two interchangeable backends are provided:

* ``numba`` -- ``@njit`` compiled loops (default when numba imports), and
* ``numpy`` -- vectorized array code.

Set ``SBO_DISABLE_NUMBA=1`` in the environment to force the numpy path.
Both backends compute the same quantities; the test-suite runs them against
each other.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("SBO_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:  # pragma: no cover - exercised implicitly depending on environment
    if _DISABLED:
        raise ImportError("disabled by SBO_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy reference implementations


def poly_eval_numpy(exps: np.ndarray, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_m coeffs[m] * prod_k points[:, k] ** exps[m, k]``."""
    if exps.shape[0] == 0:
        return np.zeros(points.shape[0], dtype=np.result_type(points, coeffs))
    out = np.zeros(points.shape[0], dtype=np.result_type(points, coeffs))
    # one monomial at a time keeps temporaries at O(points)
    for m in range(exps.shape[0]):
        term = np.full(points.shape[0], coeffs[m], dtype=out.dtype)
        for k in range(exps.shape[1]):
            e = exps[m, k]
            if e:
                term = term * points[:, k] ** e
        out += term
    return out


def weighted_sum_numpy(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sum(values * weights))


# ---------------------------------------------------------------------------
# numba versions

if HAVE_NUMBA:

    @njit(cache=True)
    def _poly_eval_real(exps, coeffs, points):  # pragma: no cover - compiled
        npts = points.shape[0]
        out = np.zeros(npts)
        for p in range(npts):
            acc = 0.0
            for m in range(exps.shape[0]):
                term = coeffs[m]
                for k in range(exps.shape[1]):
                    e = exps[m, k]
                    if e:
                        term *= points[p, k] ** e
                acc += term
            out[p] = acc
        return out

    @njit(cache=True)
    def _poly_eval_complex(exps, coeffs, points):  # pragma: no cover - compiled
        npts = points.shape[0]
        out = np.zeros(npts, dtype=np.complex128)
        for p in range(npts):
            acc = 0.0 + 0.0j
            for m in range(exps.shape[0]):
                term = coeffs[m] + 0.0j
                for k in range(exps.shape[1]):
                    e = exps[m, k]
                    if e:
                        term *= points[p, k] ** e
                acc += term
            out[p] = acc
        return out

    @njit(cache=True)
    def _weighted_sum(values, weights):  # pragma: no cover - compiled
        # compensated summation keeps the result order-independent to ~1 ulp
        acc = 0.0
        comp = 0.0
        for i in range(values.shape[0]):
            y = values[i] * weights[i] - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
        return acc

    def poly_eval_numba(exps: np.ndarray, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        exps = np.ascontiguousarray(exps, dtype=np.int64)
        coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        if np.iscomplexobj(points):
            return _poly_eval_complex(exps, coeffs, np.ascontiguousarray(points, dtype=np.complex128))
        return _poly_eval_real(exps, coeffs, np.ascontiguousarray(points, dtype=np.float64))

    def weighted_sum_numba(values: np.ndarray, weights: np.ndarray) -> float:
        return float(_weighted_sum(np.ascontiguousarray(values, dtype=np.float64), np.ascontiguousarray(weights)))


BACKENDS = ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def active_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def get(name: str, backend: str | None = None):
    """Look up kernel ``name`` for ``backend`` (default: the active one)."""
    backend = backend or active_backend()
    if backend not in BACKENDS:
        raise ValueError(f"backend {backend!r} unavailable (have {BACKENDS})")
    return globals()[f"{name}_{backend}"]


def poly_eval(exps, coeffs, points, backend: str | None = None):
    return get("poly_eval", backend)(exps, coeffs, points)


def weighted_sum(values, weights, backend: str | None = None) -> float:
    return get("weighted_sum", backend)(values, weights)
