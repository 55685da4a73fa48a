"""Synthetic propagation fields checked against closed forms and exact line-walk oracles."""

import math

import numpy as np
import pytest

from rmkit.grids import BsConfig, EnvironmentMap, UnitTag
from rmkit.synth import (
    PropagationParams,
    dominant_path_power,
    evanescent_field,
    free_space_power,
    multipath_toy,
    plane_wave,
)


def empty_env(w, h, h_x=1.0, h_y=1.0):
    z = np.zeros((h, w), dtype=bool)
    return EnvironmentMap(z, z.copy(), h_x=h_x, h_y=h_y)


def cells_crossed_oracle(sx, sy, ex, ey):
    """Cells a segment passes through, by exact boundary-crossing intervals.

    Returns the set of (ix, iy) cells with nonzero segment overlap, excluding
    the cell containing the start point.  Independent of the incremental
    grid-walk used by the implementation.
    """
    dx, dy = ex - sx, ey - sy
    ts = {0.0, 1.0}
    if dx != 0.0:
        lo, hi = sorted((sx, ex))
        for gx in range(math.ceil(lo), math.floor(hi) + 1):
            t = (gx - sx) / dx
            if 0.0 < t < 1.0:
                ts.add(t)
    if dy != 0.0:
        lo, hi = sorted((sy, ey))
        for gy in range(math.ceil(lo), math.floor(hi) + 1):
            t = (gy - sy) / dy
            if 0.0 < t < 1.0:
                ts.add(t)
    ts = sorted(ts)
    src_cell = (math.floor(sx), math.floor(sy))
    cells = set()
    for a, b in zip(ts[:-1], ts[1:]):
        if b - a <= 1e-15:  # corner touch: zero-length interval, no cell
            continue
        tm = 0.5 * (a + b)
        cell = (math.floor(sx + tm * dx), math.floor(sy + tm * dy))
        if cell != src_cell:
            cells.add(cell)
    return cells


# ---------------------------------------------------------------- free space


def test_free_space_inverse_square_ratio():
    env = empty_env(64, 9)
    bs = BsConfig(x=1.5, y=4.5)  # center of pixel (1, 4)
    f = free_space_power(env, bs, PropagationParams())
    p5 = f.data[4, 6]   # r = 5
    p10 = f.data[4, 11]  # r = 10
    assert p5 / p10 == pytest.approx(4.0, rel=1e-12)
    assert 10.0 * math.log10(p5 / p10) == pytest.approx(6.0206, abs=1e-3)


def test_free_space_static_cells_get_floor():
    static = np.zeros((9, 9), dtype=bool)
    static[2, 7] = True
    env = EnvironmentMap(static, np.zeros((9, 9), dtype=bool))
    params = PropagationParams(floor_db=-150.0)
    f = free_space_power(env, BsConfig(x=4.5, y=4.5), params)
    assert f.data[2, 7] == pytest.approx(10.0 ** (-15.0), rel=1e-12)


def test_free_space_matches_per_pixel_oracle():
    env = empty_env(33, 33)
    bs = BsConfig(x=16.5, y=16.5)
    f = free_space_power(env, bs, PropagationParams())
    assert f.unit is UnitTag.LINEAR_POWER
    for j in range(33):
        for i in range(33):
            r = math.hypot((i + 0.5) - 16.5, (j + 0.5) - 16.5)
            r = max(r, 1.0)  # clamp at one pixel spacing
            assert f.data[j, i] == pytest.approx(1.0 / r**2, rel=1e-13)


def test_free_space_radial_symmetry():
    env = empty_env(33, 33)
    f = free_space_power(env, BsConfig(x=16.5, y=16.5), PropagationParams()).data
    for flipped in (f[::-1, :], f[:, ::-1], f.T):
        assert np.max(np.abs(f - flipped) / f) <= 1e-12


def test_free_space_reference_power_at_one_meter():
    env = empty_env(9, 9, h_x=0.5, h_y=0.5)
    bs = BsConfig(x=1.25, y=2.25)  # center of pixel (2, 4)
    f = free_space_power(env, bs, PropagationParams())
    # pixel (6, 4) center = (3.25, 2.25): r = 2.0 -> I = 1/4
    assert f.data[4, 6] == pytest.approx(0.25, rel=1e-12)


# -------------------------------------------------------------- dominant path


def test_dominant_path_empty_env_equals_free_space():
    env = empty_env(21, 17)
    bs = BsConfig(x=3.5, y=8.5)
    params = PropagationParams(wall_loss_db=10.0)
    fs = free_space_power(env, bs, params)
    dp = dominant_path_power(env, bs, params)
    assert np.array_equal(fs.data, dp.data)


def test_dominant_path_static_wall_shields():
    static = np.zeros((9, 21), dtype=bool)
    static[:, 10] = True  # full vertical wall
    env = EnvironmentMap(static, np.zeros_like(static))
    params = PropagationParams(floor_db=-150.0)
    dp = dominant_path_power(env, BsConfig(x=2.5, y=4.5), params)
    floor_lin = 10.0 ** (-15.0)
    assert np.all(dp.data[:, 11:] == pytest.approx(floor_lin, rel=1e-12))
    # near side unaffected
    fs = free_space_power(env, BsConfig(x=2.5, y=4.5), params)
    assert np.array_equal(dp.data[:, :10], fs.data[:, :10])


def test_dominant_path_single_dynamic_cell_costs_wall_loss():
    dyn = np.zeros((9, 21), dtype=bool)
    dyn[4, 6] = True
    env = EnvironmentMap(np.zeros_like(dyn), dyn)
    params = PropagationParams(wall_loss_db=10.0)
    bs = BsConfig(x=2.5, y=4.5)
    dp = dominant_path_power(env, bs, params)
    fs = free_space_power(env, bs, params)
    # horizontal ray through the obstacle: exactly one crossing -> -10 dB
    assert dp.data[4, 15] == pytest.approx(fs.data[4, 15] * 0.1, rel=1e-12)
    # ray that misses it: unattenuated
    assert dp.data[0, 15] == fs.data[0, 15]


def test_dominant_path_crossings_match_interval_oracle(rng):
    w, h = 17, 13
    static = np.zeros((h, w), dtype=bool)
    dyn = np.zeros((h, w), dtype=bool)
    occ = rng.random((h, w))
    static[occ < 0.06] = True
    dyn[(occ >= 0.06) & (occ < 0.2)] = True
    static[3, 2] = dyn[3, 2] = False  # keep the source cell free
    env = EnvironmentMap(static, dyn)
    bs = BsConfig(x=2.5, y=3.5)
    params = PropagationParams(wall_loss_db=7.0, floor_db=-150.0)
    dp = dominant_path_power(env, bs, params)
    fs = free_space_power(env, bs, params)
    floor_lin = 10.0 ** (params.floor_db / 10.0)
    for j in range(h):
        for i in range(w):
            cells = cells_crossed_oracle(2.5, 3.5, i + 0.5, j + 0.5)
            cells.add((i, j))  # target cell always counts
            cells.discard((2, 3))
            if any(static[cy, cx] for cx, cy in cells) or static[j, i]:
                expect = floor_lin
            else:
                n_dyn = sum(dyn[cy, cx] for cx, cy in cells)
                expect = fs.data[j, i] * 10.0 ** (-params.wall_loss_db * n_dyn / 10.0)
            assert dp.data[j, i] == pytest.approx(expect, rel=1e-12), (i, j)


def test_dominant_path_never_exceeds_free_space(rng):
    w = h = 25
    static = rng.random((h, w)) < 0.05
    dyn = (rng.random((h, w)) < 0.15) & ~static
    env = EnvironmentMap(static, dyn)
    bs = BsConfig(x=12.5, y=12.5)
    params = PropagationParams(wall_loss_db=5.0)
    dp = dominant_path_power(env, bs, params)
    fs = free_space_power(env, bs, params)
    assert np.all(dp.data <= fs.data * (1 + 1e-12))


def test_dominant_path_diagonal_corner_tie_counts_once():
    # segment from (0.5,0.5) to (3.5,3.5) passes exactly through cell corners;
    # the diagonal cells count, the side cells do not
    dyn = np.zeros((5, 5), dtype=bool)
    dyn[1, 1] = True
    dyn[2, 1] = True  # side cell at the corner tie: must NOT count
    env = EnvironmentMap(np.zeros_like(dyn), dyn)
    params = PropagationParams(wall_loss_db=10.0)
    bs = BsConfig(x=0.5, y=0.5)
    dp = dominant_path_power(env, bs, params)
    fs = free_space_power(env, bs, params)
    assert dp.data[3, 3] == pytest.approx(fs.data[3, 3] * 0.1, rel=1e-12)


# --------------------------------------------------------------- evanescent


def test_evanescent_ratio_against_closed_form():
    params = PropagationParams(gamma=0.1)
    f = evanescent_field(64, 9, (1.5, 4.5), params)
    u5 = f.data[4, 6]    # r = 5
    u10 = f.data[4, 11]  # r = 10
    assert u10 / u5 == pytest.approx(math.exp(-0.1 * 5.0) / 2.0, rel=1e-12)


def test_evanescent_gamma_zero_is_pure_inverse_r():
    f = evanescent_field(32, 9, (1.5, 4.5), PropagationParams(gamma=0.0))
    for i in (5, 9, 17):
        r = (i + 0.5) - 1.5
        assert f.data[4, i] == pytest.approx(1.0 / r, rel=1e-13)


def test_evanescent_scalar_formula_samples():
    params = PropagationParams(gamma=0.1)
    f = evanescent_field(64, 9, (1.5, 4.5), params)
    assert f.unit is UnitTag.AMPLITUDE
    for r, i in ((5.0, 6), (10.0, 11), (20.0, 21)):
        assert f.data[4, i] == pytest.approx(math.exp(-0.1 * r) / r, rel=1e-13)


# --------------------------------------------------------------- plane wave


def test_plane_wave_zero_k_is_unity():
    u = plane_wave(7, 5, (0.0, 0.0))
    assert np.array_equal(u.data, np.ones((5, 7), dtype=np.complex128))


def test_plane_wave_unit_modulus(rng):
    u = plane_wave(16, 12, (0.37, -0.21))
    assert np.abs(np.abs(u.data) - 1.0).max() <= 1e-14


def test_plane_wave_phase_dot_product():
    u = plane_wave(6, 6, (0.5, 0.25), h_x=0.8, h_y=1.2)
    # pixel (2,2) center = (2.0, 3.0): phase = 0.5*2 + 0.25*3 = 1.75
    assert np.angle(u.data[2, 2]) == pytest.approx(1.75, abs=1e-13)


# ---------------------------------------------------------------- multipath


def test_multipath_order_zero_is_single_spherical_wave():
    env = empty_env(24, 20)
    bs = BsConfig(x=3.5, y=10.5)
    params = PropagationParams(k=0.9, reflection_order=0)
    u = multipath_toy(env, bs, params)
    for j in range(20):
        for i in range(24):
            r = max(math.hypot(i + 0.5 - 3.5, j + 0.5 - 10.5), 1.0)
            assert abs(u.data[j, i]) == pytest.approx(1.0 / r, rel=1e-12)


def test_multipath_single_wall_destructive_point():
    env = empty_env(24, 20)
    bs = BsConfig(x=3.5, y=10.5)
    # image across x=0 sits at (-3.5, 10.5); at pixel (13,10): r1=10, r2=17
    k = math.pi / 7.0  # path difference 7 = half wavelength
    params = PropagationParams(k=k, reflection_order=1)
    u = multipath_toy(env, bs, params, walls=[("x", 0.0)])
    expect = abs(1.0 / 10.0 - 1.0 / 17.0)
    assert abs(u.data[10, 13]) == pytest.approx(expect, rel=1e-12)


def test_multipath_two_wall_corridor_matches_enumeration():
    w, h = 24, 20
    env = empty_env(w, h)
    bs = BsConfig(x=3.5, y=10.5)
    k = 0.7
    params = PropagationParams(k=k, reflection_order=2)
    u = multipath_toy(env, bs, params, walls=[("x", 0.0), ("x", 24.0)])
    # corridor images up to order 2: x, -x, 2L-x, 2L+x, x-2L (5 terms)
    sources = [3.5, -3.5, 44.5, 51.5, -44.5]
    for j in range(h):
        for i in range(w):
            cx, cy = i + 0.5, j + 0.5
            acc = 0.0 + 0.0j
            for sx in sources:
                r = max(math.hypot(cx - sx, cy - 10.5), 1.0)
                acc += np.exp(1j * k * r) / r
            assert u.data[j, i] == pytest.approx(acc, rel=1e-11), (i, j)


def test_multipath_no_walls_equals_direct_term():
    env = empty_env(16, 16)
    bs = BsConfig(x=5.5, y=6.5)
    params = PropagationParams(k=1.3, reflection_order=3)
    u_none = multipath_toy(env, bs, params, walls=[])
    u_direct = multipath_toy(env, bs, PropagationParams(k=1.3, reflection_order=0))
    assert np.array_equal(u_none.data, u_direct.data)


def test_multipath_static_cell_blocks_source():
    static = np.zeros((9, 21), dtype=bool)
    static[:, 10] = True
    env = EnvironmentMap(static, np.zeros_like(static))
    bs = BsConfig(x=2.5, y=4.5)
    u = multipath_toy(env, bs, PropagationParams(k=1.0, reflection_order=0))
    assert np.all(u.data[:, 11:] == 0.0)  # shadowed side sees nothing
    assert abs(u.data[4, 5]) > 0.0


def test_multipath_rejects_excessive_order():
    with pytest.raises(ValueError):
        PropagationParams(reflection_order=5)
