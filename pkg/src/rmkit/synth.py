"""Synthetic propagation-field generators on pixel grids.

All generators share the pixel-center convention from grids and clamp the
source distance at one pixel spacing so the singular 1/r terms stay finite.
Obstacle handling uses an incremental grid walk along the source-to-pixel
segment: static cells block the path outright, dynamic cells each charge a
fixed wall loss.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grids import ComplexField, ScalarField, UnitTag


@dataclass(frozen=True)
class PropagationParams:
    """Knobs for the synthetic generators.

    gamma            decay rate of the evanescent profile (1/m)
    k                wavenumber for the oscillatory generators (rad/m)
    wall_loss_db     penetration loss charged per dynamic cell crossed
    floor_db         power assigned to blocked / in-wall pixels (dB)
    reflection_order image-source mirror depth for the multipath generator
    """

    gamma: float = 0.1
    k: float = 1.0
    wall_loss_db: float = 10.0
    floor_db: float = -150.0
    reflection_order: int = 2

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.wall_loss_db < 0:
            raise ValueError("wall_loss_db must be non-negative")
        order = self.reflection_order
        if order != int(order) or not 0 <= int(order) <= 4:
            raise ValueError("reflection_order must be an integer in [0, 4]")


def _center_axes(width, height, h_x, h_y):
    x = (np.arange(width) + 0.5) * h_x
    y = (np.arange(height) + 0.5) * h_y
    return x, y


def _clamped_distance(width, height, h_x, h_y, cx, cy):
    x, y = _center_axes(width, height, h_x, h_y)
    r = np.hypot(x[None, :] - cx, y[:, None] - cy)
    return np.maximum(r, max(h_x, h_y))


def free_space_power(env, bs, params):
    """Inverse-square power map; static cells are pinned at the floor."""
    r = _clamped_distance(env.width, env.height, env.h_x, env.h_y, bs.x, bs.y)
    out = 1.0 / (r * r)
    out[env.static] = 10.0 ** (params.floor_db / 10.0)
    return ScalarField(out, h_x=env.h_x, h_y=env.h_y, unit=UnitTag.LINEAR_POWER)


def dominant_path_power(env, bs, params):
    """Free-space power attenuated along the straight source-pixel ray.

    A ray crossing any static cell (or ending in one) drops to the floor;
    otherwise each dynamic cell crossed multiplies in one wall loss.  Rays
    touching no obstacle keep the free-space value bit-for-bit.
    """
    fs = free_space_power(env, bs, params)
    out = fs.data.copy()
    floor_lin = 10.0 ** (params.floor_db / 10.0)
    static, dyn = env.static, env.dynamic
    hx, hy = env.h_x, env.h_y
    for j in range(env.height):
        ey = (j + 0.5) * hy
        for i in range(env.width):
            blocked, n_dyn = kernels.segment_walk(
                static, dyn, bs.x, bs.y, (i + 0.5) * hx, ey, hx, hy)
            if blocked or static[j, i]:
                out[j, i] = floor_lin
            elif n_dyn:
                out[j, i] = out[j, i] * 10.0 ** (-params.wall_loss_db * n_dyn / 10.0)
    return ScalarField(out, h_x=hx, h_y=hy, unit=UnitTag.LINEAR_POWER)


def evanescent_field(width, height, center, params, h_x=1.0, h_y=1.0):
    """Radially decaying amplitude exp(-gamma*r)/r around ``center``."""
    r = _clamped_distance(width, height, h_x, h_y, center[0], center[1])
    out = np.exp(-params.gamma * r) / r
    return ScalarField(out, h_x=h_x, h_y=h_y, unit=UnitTag.AMPLITUDE)


def plane_wave(width, height, k_vec, h_x=1.0, h_y=1.0):
    """Unit-amplitude complex plane wave exp(i k.x) sampled at pixel centers."""
    x, y = _center_axes(width, height, h_x, h_y)
    phase = k_vec[0] * x[None, :] + k_vec[1] * y[:, None]
    return ComplexField(np.exp(1j * phase), h_x=h_x, h_y=h_y)


def _image_sources(bs, walls, order):
    """Mirror the source across axis-aligned walls, breadth-first.

    Deduplication is by exact coordinate tuple, which suffices because each
    mirror is the same closed-form reflection however it is reached.
    """
    sources = [(bs.x, bs.y)]
    seen = {(bs.x, bs.y)}
    frontier = [(bs.x, bs.y)]
    for _ in range(order):
        nxt = []
        for x, y in frontier:
            for axis, pos in walls:
                if axis == "x":
                    cand = (2.0 * pos - x, y)
                elif axis == "y":
                    cand = (x, 2.0 * pos - y)
                else:
                    raise ValueError("wall axis must be 'x' or 'y', got %r" % (axis,))
                if cand not in seen:
                    seen.add(cand)
                    sources.append(cand)
                    nxt.append(cand)
        frontier = nxt
    return sources


def multipath_toy(env, bs, params, walls=None):
    """Sum of spherical waves from image sources of ``bs``.

    ``walls`` is a list of (axis, position) mirror planes, defaulting to the
    four domain edges.  Static cells occlude each source individually; a
    pixel no source can see stays exactly zero.
    """
    hx, hy = env.h_x, env.h_y
    if walls is None:
        walls = [("x", 0.0), ("x", env.width * hx),
                 ("y", 0.0), ("y", env.height * hy)]
    order = int(params.reflection_order)
    sources = _image_sources(bs, walls, order)
    static = env.static
    no_dyn = np.zeros_like(static)
    any_static = bool(static.any())
    x, y = _center_axes(env.width, env.height, hx, hy)
    out = np.zeros((env.height, env.width), dtype=np.complex128)
    for sx, sy in sources:
        r = np.hypot(x[None, :] - sx, y[:, None] - sy)
        r = np.maximum(r, max(hx, hy))
        term = np.exp(1j * params.k * r) / r
        if any_static:
            vis = np.empty(out.shape, dtype=bool)
            for j in range(env.height):
                for i in range(env.width):
                    blocked, _ = kernels.segment_walk(
                        static, no_dyn, sx, sy, x[i], y[j], hx, hy)
                    vis[j, i] = not blocked and not static[j, i]
            out[vis] += term[vis]
        else:
            out += term
    return ComplexField(out, h_x=hx, h_y=hy)
