"""Hot numeric kernels in two bitwise-identical flavors (numba / numpy).

Array kernels (stencil, row convolution) exist as a vectorized numpy
expression and a scalar loop with the same per-element operation tree, so
both produce identical bits.  The grid-walk kernel is one Python function
compiled twice.  The module-level names ``laplacian_padded``,
``convolve_rows`` and ``segment_walk`` point at the active backend.
"""

import math

import numpy as np

from .backend import USE_NUMBA

if USE_NUMBA:
    from numba import njit


def laplacian_padded_numpy(padded, inv_hx2, inv_hy2):
    """5-point stencil on a 1-pixel-padded array; returns the unpadded shape."""
    c = padded[1:-1, 1:-1]
    return (padded[1:-1, :-2] + padded[1:-1, 2:] - 2.0 * c) * inv_hx2 \
        + (padded[:-2, 1:-1] + padded[2:, 1:-1] - 2.0 * c) * inv_hy2


def _laplacian_padded_loop(padded, inv_hx2, inv_hy2):
    h = padded.shape[0] - 2
    w = padded.shape[1] - 2
    out = np.empty((h, w), dtype=np.float64)
    for j in range(h):
        for i in range(w):
            c = padded[j + 1, i + 1]
            out[j, i] = (padded[j + 1, i] + padded[j + 1, i + 2] - 2.0 * c) * inv_hx2 \
                + (padded[j, i + 1] + padded[j + 2, i + 1] - 2.0 * c) * inv_hy2
    return out


def convolve_rows_numpy(padded, w):
    """Valid-mode 1-D convolution along rows; padded is wider by len(w)-1."""
    n = padded.shape[1] - (w.shape[0] - 1)
    out = np.zeros((padded.shape[0], n), dtype=np.float64)
    for m in range(w.shape[0]):
        out += w[m] * padded[:, m:m + n]
    return out


def _convolve_rows_loop(padded, w):
    nw = w.shape[0]
    h = padded.shape[0]
    n = padded.shape[1] - (nw - 1)
    out = np.empty((h, n), dtype=np.float64)
    for j in range(h):
        for i in range(n):
            acc = 0.0
            for m in range(nw):
                acc += w[m] * padded[j, i + m]
            out[j, i] = acc
    return out


def _segment_walk(static, dyn, sx, sy, ex, ey, hx, hy):
    """Walk the cells a segment enters, skipping the start cell.

    Coordinates are in meters; cells are indexed in pixel units.  Crossing
    parameters are recomputed from the grid-line index each step (not
    accumulated), and two crossings closer than 1e-15 count as one corner:
    the walk advances diagonally, entering the corner-touching cell once
    and neither zero-overlap side cell.  Returns (crossed_static,
    dynamic_cell_count); the end cell is included, cells outside the grid
    are treated as free space.
    """
    h = static.shape[0]
    w = static.shape[1]
    px = sx / hx
    py = sy / hy
    qx = ex / hx
    qy = ey / hy
    dx = qx - px
    dy = qy - py
    cx = int(math.floor(px))
    cy = int(math.floor(py))
    tx = int(math.floor(qx))
    ty = int(math.floor(qy))
    blocked = False
    n_dyn = 0
    if cx == tx and cy == ty:
        return blocked, n_dyn
    if dx > 0.0:
        step_x = 1
        line_x = cx + 1
    else:
        step_x = -1
        line_x = cx
    if dy > 0.0:
        step_y = 1
        line_y = cy + 1
    else:
        step_y = -1
        line_y = cy
    t_x = (line_x - px) / dx if dx != 0.0 else math.inf
    t_y = (line_y - py) / dy if dy != 0.0 else math.inf
    limit = abs(tx - cx) + abs(ty - cy) + 4
    for _ in range(limit):
        if t_x - t_y > 1e-15:
            cy += step_y
            line_y += step_y
            t_y = (line_y - py) / dy
        elif t_y - t_x > 1e-15:
            cx += step_x
            line_x += step_x
            t_x = (line_x - px) / dx
        else:
            cx += step_x
            cy += step_y
            line_x += step_x
            line_y += step_y
            t_x = (line_x - px) / dx
            t_y = (line_y - py) / dy
        if 0 <= cx < w and 0 <= cy < h:
            if static[cy, cx]:
                blocked = True
            if dyn[cy, cx]:
                n_dyn += 1
        if cx == tx and cy == ty:
            break
    return blocked, n_dyn


segment_walk_py = _segment_walk

if USE_NUMBA:
    laplacian_padded_numba = njit(cache=True)(_laplacian_padded_loop)
    convolve_rows_numba = njit(cache=True)(_convolve_rows_loop)
    segment_walk_nb = njit(cache=True)(_segment_walk)
    laplacian_padded = laplacian_padded_numba
    convolve_rows = convolve_rows_numba
    segment_walk = segment_walk_nb
else:
    laplacian_padded_numba = _laplacian_padded_loop
    convolve_rows_numba = _convolve_rows_loop
    segment_walk_nb = _segment_walk
    laplacian_padded = laplacian_padded_numpy
    convolve_rows = convolve_rows_numpy
    segment_walk = segment_walk_py
