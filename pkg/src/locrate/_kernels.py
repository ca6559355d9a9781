"""Hot numeric kernels.

Both kernels exist in two variants: a numba ``@njit`` loop (default) and a
vectorized pure-numpy fallback.  Setting the environment variable
``LOCRATE_NO_NUMBA=1`` before import selects the numpy path; the selected
variant is exported under the generic name.  ``benchmarks/bench_kernels.py``
compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("LOCRATE_NO_NUMBA", "0") == "1"

NUMBA_ENABLED = False
if not _FORCE_NUMPY:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


# ---------------------------------------------------------------------------
# Batched instantaneous capacity under random per-path phases.
#
# steer[j, k] = a_k * exp(-2*pi*i*spacing*j*tau_k) is precomputed by the
# caller; the kernel applies exp(i*theta_k) per realization and sums
# log2(1 + snr*|h_j|^2) over subcarriers.
# ---------------------------------------------------------------------------


def _capacity_batch_loop(steer, phases, tx_snr):
    n_sub, n_path = steer.shape
    n_real = phases.shape[0]
    out = np.empty(n_real)
    rot = np.empty(n_path, np.complex128)
    for m in range(n_real):
        for k in range(n_path):
            rot[k] = np.cos(phases[m, k]) + 1j * np.sin(phases[m, k])
        cap = 0.0
        for j in range(n_sub):
            h = 0.0 + 0.0j
            for k in range(n_path):
                h += steer[j, k] * rot[k]
            cap += np.log2(1.0 + tx_snr * (h.real * h.real + h.imag * h.imag))
        out[m] = cap
    return out


def _capacity_batch_numpy(steer, phases, tx_snr):
    n_sub = steer.shape[0]
    n_real = phases.shape[0]
    out = np.empty(n_real)
    # chunked to bound the (chunk, n_sub) temporary
    chunk = max(1, int(4_000_000 // max(n_sub, 1)))
    steer_t = steer.T
    for s in range(0, n_real, chunk):
        rot = np.exp(1j * phases[s : s + chunk])
        h = rot @ steer_t
        out[s : s + chunk] = np.log2(1.0 + tx_snr * (h.real**2 + h.imag**2)).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# Minimum of a gridded map over an ellipse (z - p)^T Sinv (z - p) <= q2 per
# query point.  Sinv is passed as its entries (a, b; b, c).  Queries whose
# ellipse contains no grid point fall back to the nearest grid value.
# Degenerate disks (distance scheme) use a = c = 1, b = 0, q2 = d^2.
# ---------------------------------------------------------------------------


def _min_in_ellipse_loop(xs, ys, values, pts, qa, qb, qc, q2):
    n = pts.shape[0]
    out = np.empty(n)
    x0 = xs[0]
    y0 = ys[0]
    dx = xs[1] - xs[0] if xs.shape[0] > 1 else 1.0
    dy = ys[1] - ys[0] if ys.shape[0] > 1 else 1.0
    nx = xs.shape[0]
    ny = ys.shape[0]
    det = qa * qc - qb * qb
    # bounding-box half widths from the covariance (inverse of the quad form)
    hx = np.sqrt(max(q2 * qc / det, 0.0))
    hy = np.sqrt(max(q2 * qa / det, 0.0))
    for i in range(n):
        px = pts[i, 0]
        py = pts[i, 1]
        i_lo = int(np.ceil((px - hx - x0) / dx - 1e-12))
        i_hi = int(np.floor((px + hx - x0) / dx + 1e-12))
        j_lo = int(np.ceil((py - hy - y0) / dy - 1e-12))
        j_hi = int(np.floor((py + hy - y0) / dy + 1e-12))
        if i_lo < 0:
            i_lo = 0
        if i_hi > nx - 1:
            i_hi = nx - 1
        if j_lo < 0:
            j_lo = 0
        if j_hi > ny - 1:
            j_hi = ny - 1
        best = np.inf
        for gi in range(i_lo, i_hi + 1):
            zx = x0 + gi * dx - px
            for gj in range(j_lo, j_hi + 1):
                zy = y0 + gj * dy - py
                if qa * zx * zx + 2.0 * qb * zx * zy + qc * zy * zy <= q2:
                    v = values[gi, gj]
                    if v < best:
                        best = v
        if best == np.inf:
            gi = int(round((px - x0) / dx))
            gj = int(round((py - y0) / dy))
            if gi < 0:
                gi = 0
            if gi > nx - 1:
                gi = nx - 1
            if gj < 0:
                gj = 0
            if gj > ny - 1:
                gj = ny - 1
            best = values[gi, gj]
        out[i] = best
    return out


def _min_in_ellipse_numpy(xs, ys, values, pts, qa, qb, qc, q2):
    n = pts.shape[0]
    out = np.empty(n)
    nx = xs.shape[0]
    ny = ys.shape[0]
    x0 = xs[0]
    y0 = ys[0]
    dx = xs[1] - xs[0] if nx > 1 else 1.0
    dy = ys[1] - ys[0] if ny > 1 else 1.0
    det = qa * qc - qb * qb
    hx = np.sqrt(max(q2 * qc / det, 0.0))
    hy = np.sqrt(max(q2 * qa / det, 0.0))
    for i in range(n):
        px, py = pts[i]
        i_lo = max(0, int(np.ceil((px - hx - x0) / dx - 1e-12)))
        i_hi = min(nx - 1, int(np.floor((px + hx - x0) / dx + 1e-12)))
        j_lo = max(0, int(np.ceil((py - hy - y0) / dy - 1e-12)))
        j_hi = min(ny - 1, int(np.floor((py + hy - y0) / dy + 1e-12)))
        if i_lo <= i_hi and j_lo <= j_hi:
            zx = xs[i_lo : i_hi + 1, None] - px
            zy = ys[None, j_lo : j_hi + 1] - py
            inside = qa * zx**2 + 2.0 * qb * zx * zy + qc * zy**2 <= q2
            if inside.any():
                block = values[i_lo : i_hi + 1, j_lo : j_hi + 1]
                out[i] = block[inside].min()
                continue
        gi = min(max(int(round((px - x0) / dx)), 0), nx - 1)
        gj = min(max(int(round((py - y0) / dy)), 0), ny - 1)
        out[i] = values[gi, gj]
    return out


if NUMBA_ENABLED:
    capacity_batch = njit(cache=True)(_capacity_batch_loop)
    min_in_ellipse = njit(cache=True)(_min_in_ellipse_loop)
else:
    capacity_batch = _capacity_batch_numpy
    min_in_ellipse = _min_in_ellipse_numpy
