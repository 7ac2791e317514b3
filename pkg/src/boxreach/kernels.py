"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The active implementation is chosen once at import time from the
``BOXREACH_BACKEND`` environment variable: ``numba`` (default when numba
imports), ``numpy`` (force the fallback), or ``auto``.

Each kernel's result depends only on its per-cell inputs, never on how
the batch is chunked, so splitting work across threads cannot change a
single bit. Both backends accumulate in the same order (bias first,
then ascending input index) and agree bitwise on the affine bounds;
the transcendental activations may differ between backends by an ulp
(numpy's vectorized exp vs libm), never within one.
"""

from __future__ import annotations

import math
import os

import numpy as np

# Activation codes shared by both backends and by the network module.
ACT_RELU = 0
ACT_LOGISTIC = 1
ACT_TANH = 2
ACT_LINEAR = 3
ACT_GAUSSIAN = 4

_ENV_VAR = "BOXREACH_BACKEND"


# ---------------------------------------------------------------------------
# Pure-numpy fallback implementations.
# Loops run over neurons/inputs (small), vectorized across cells (large).


def affine_bounds_numpy(lo, hi, w, b):
    """Exact per-cell min/max of w @ eta + b over boxes [lo, hi].

    lo, hi: (cells, n_in); w: (n_out, n_in); b: (n_out,).
    Returns (zlo, zhi), each (cells, n_out).
    """
    n_out, n_in = w.shape
    cells = lo.shape[0]
    zlo = np.empty((cells, n_out), dtype=np.float64)
    zhi = np.empty((cells, n_out), dtype=np.float64)
    for i in range(n_out):
        acc_lo = np.full(cells, b[i], dtype=np.float64)
        acc_hi = np.full(cells, b[i], dtype=np.float64)
        for j in range(n_in):
            wij = w[i, j]
            if wij >= 0.0:
                acc_lo += wij * lo[:, j]
                acc_hi += wij * hi[:, j]
            else:
                acc_lo += wij * hi[:, j]
                acc_hi += wij * lo[:, j]
        zlo[:, i] = acc_lo
        zhi[:, i] = acc_hi
    return zlo, zhi


def interval_activation_numpy(zlo, zhi, act):
    """Image intervals of pre-activation intervals under activation `act`."""
    if act == ACT_LINEAR:
        return zlo.copy(), zhi.copy()
    if act == ACT_RELU:
        return np.where(zlo > 0.0, zlo, 0.0), np.where(zhi > 0.0, zhi, 0.0)
    if act == ACT_LOGISTIC:
        return 1.0 / (1.0 + np.exp(-zlo)), 1.0 / (1.0 + np.exp(-zhi))
    if act == ACT_TANH:
        return np.tanh(zlo), np.tanh(zhi)
    if act == ACT_GAUSSIAN:
        glo = np.exp(-(zlo * zlo))
        ghi = np.exp(-(zhi * zhi))
        # Four cases: all <= 0 (increasing), all >= 0 (decreasing),
        # straddling zero with the min at whichever endpoint is farther out.
        out_lo = np.where(zhi <= 0.0, glo,
                          np.where(zlo >= 0.0, ghi,
                                   np.where(zlo + zhi <= 0.0, glo, ghi)))
        out_hi = np.where(zhi <= 0.0, ghi,
                          np.where(zlo >= 0.0, glo, 1.0))
        return out_lo, out_hi
    raise ValueError(f"unknown activation code {act}")


def points_in_union_numpy(points, los, his):
    """Closed-set membership of each point in the union of boxes.

    points: (P, n); los, his: (N, n). Returns bool (P,).
    """
    result = np.zeros(len(points), dtype=np.bool_)
    # Chunk the broadcast so the (chunk, N, n) temporary stays small.
    chunk = max(1, 4_000_000 // max(1, los.shape[0] * los.shape[1]))
    for start in range(0, len(points), chunk):
        p = points[start:start + chunk]
        inside = np.all((los[None, :, :] <= p[:, None, :])
                        & (p[:, None, :] <= his[None, :, :]), axis=2)
        result[start:start + chunk] = inside.any(axis=1)
    return result


# ---------------------------------------------------------------------------
# Numba-jitted implementations (same accumulation order as the fallback).

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def affine_bounds_numba(lo, hi, w, b):
        n_out, n_in = w.shape
        cells = lo.shape[0]
        zlo = np.empty((cells, n_out), dtype=np.float64)
        zhi = np.empty((cells, n_out), dtype=np.float64)
        for p in range(cells):
            for i in range(n_out):
                acc_lo = b[i]
                acc_hi = b[i]
                for j in range(n_in):
                    wij = w[i, j]
                    if wij >= 0.0:
                        acc_lo += wij * lo[p, j]
                        acc_hi += wij * hi[p, j]
                    else:
                        acc_lo += wij * hi[p, j]
                        acc_hi += wij * lo[p, j]
                zlo[p, i] = acc_lo
                zhi[p, i] = acc_hi
        return zlo, zhi

    @njit(cache=True, nogil=True)
    def interval_activation_numba(zlo, zhi, act):
        cells, n = zlo.shape
        out_lo = np.empty((cells, n), dtype=np.float64)
        out_hi = np.empty((cells, n), dtype=np.float64)
        for p in range(cells):
            for i in range(n):
                a = zlo[p, i]
                c = zhi[p, i]
                if act == ACT_LINEAR:
                    lo_v, hi_v = a, c
                elif act == ACT_RELU:
                    lo_v = a if a > 0.0 else 0.0
                    hi_v = c if c > 0.0 else 0.0
                elif act == ACT_LOGISTIC:
                    lo_v = 1.0 / (1.0 + math.exp(-a))
                    hi_v = 1.0 / (1.0 + math.exp(-c))
                elif act == ACT_TANH:
                    lo_v = math.tanh(a)
                    hi_v = math.tanh(c)
                else:  # ACT_GAUSSIAN
                    ga = math.exp(-(a * a))
                    gc = math.exp(-(c * c))
                    if c <= 0.0:
                        lo_v, hi_v = ga, gc
                    elif a >= 0.0:
                        lo_v, hi_v = gc, ga
                    elif a + c <= 0.0:
                        lo_v, hi_v = ga, 1.0
                    else:
                        lo_v, hi_v = gc, 1.0
                out_lo[p, i] = lo_v
                out_hi[p, i] = hi_v
        return out_lo, out_hi

    @njit(cache=True, nogil=True)
    def points_in_union_numba(points, los, his):
        n_pts, n = points.shape
        n_boxes = los.shape[0]
        result = np.zeros(n_pts, dtype=np.bool_)
        for p in range(n_pts):
            for k in range(n_boxes):
                inside = True
                for i in range(n):
                    v = points[p, i]
                    if v < los[k, i] or v > his[k, i]:
                        inside = False
                        break
                if inside:
                    result[p] = True
                    break
        return result

else:  # pragma: no cover
    affine_bounds_numba = None
    interval_activation_numba = None
    points_in_union_numba = None


def _select_backend() -> str:
    requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'auto', 'numba', or 'numpy', got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        raise ValueError(f"{_ENV_VAR}=numba but numba is not importable")
    if requested == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    return requested


BACKEND = _select_backend()

if BACKEND == "numba":
    affine_bounds_batch = affine_bounds_numba
    interval_activation_batch = interval_activation_numba
    points_in_union = points_in_union_numba
else:
    affine_bounds_batch = affine_bounds_numpy
    interval_activation_batch = interval_activation_numpy
    points_in_union = points_in_union_numpy


def active_backend() -> str:
    """Name of the kernel backend chosen at import time."""
    return BACKEND
