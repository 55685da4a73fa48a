"""Grid value types shared across the package.

Fields are immutable: construction copies the input array and freezes it,
so downstream code can hand fields around without defensive copies.  Pixel
(ix, iy) covers [ix*h_x, (ix+1)*h_x) x [iy*h_y, (iy+1)*h_y) in meters and
its center sits at ((ix+0.5)*h_x, (iy+0.5)*h_y).
"""

import enum
from dataclasses import dataclass

import numpy as np


class UnitTag(enum.Enum):
    LINEAR_POWER = "linear_power"
    AMPLITUDE = "amplitude"
    NORMALIZED_GRAY = "normalized_gray"
    K_SQUARED = "k_squared"
    LOG_AMPLITUDE = "log_amplitude"


class Boundary(enum.Enum):
    REPLICATE = "replicate"
    MIRROR = "mirror"
    ZERO = "zero"


class ShapeMismatchError(ValueError):
    """An array had the wrong rank or its shape disagreed with a partner."""


def _check_spacing(h_x, h_y):
    if h_x <= 0 or h_y <= 0:
        raise ValueError("pixel spacing must be positive, got h_x=%r h_y=%r"
                         % (h_x, h_y))


class ScalarField:
    """A real-valued 2-D field with pixel spacing and a unit tag."""

    def __init__(self, data, h_x=1.0, h_y=1.0, unit=UnitTag.LINEAR_POWER):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeMismatchError("expected a 2-D array, got shape %r"
                                     % (arr.shape,))
        _check_spacing(h_x, h_y)
        if unit in (UnitTag.LINEAR_POWER, UnitTag.AMPLITUDE):
            if arr.size and arr.min() < 0.0:
                raise ValueError("%s fields must be non-negative" % unit.value)
        arr.setflags(write=False)
        self._data = arr
        self.h_x = float(h_x)
        self.h_y = float(h_y)
        self.unit = unit

    @property
    def data(self):
        return self._data

    @property
    def width(self):
        return self._data.shape[1]

    @property
    def height(self):
        return self._data.shape[0]

    def pixel_center(self, ix, iy):
        """Meter coordinates (x, y) of the center of pixel (ix, iy)."""
        return ((ix + 0.5) * self.h_x, (iy + 0.5) * self.h_y)


class ComplexField:
    """A complex-valued 2-D field; every entry must be finite."""

    def __init__(self, data, h_x=1.0, h_y=1.0):
        arr = np.array(data, dtype=np.complex128)
        if arr.ndim != 2:
            raise ShapeMismatchError("expected a 2-D array, got shape %r"
                                     % (arr.shape,))
        _check_spacing(h_x, h_y)
        if not np.all(np.isfinite(arr)):
            raise ValueError("complex field entries must be finite")
        arr.setflags(write=False)
        self._data = arr
        self.h_x = float(h_x)
        self.h_y = float(h_y)

    @property
    def data(self):
        return self._data

    @property
    def width(self):
        return self._data.shape[1]

    @property
    def height(self):
        return self._data.shape[0]

    def pixel_center(self, ix, iy):
        return ((ix + 0.5) * self.h_x, (iy + 0.5) * self.h_y)


class OutlineMask:
    """A boolean 2-D mask marking pixels inside a detected outline."""

    def __init__(self, bits):
        arr = np.array(bits, dtype=bool)
        if arr.ndim != 2:
            raise ShapeMismatchError("expected a 2-D mask, got shape %r"
                                     % (arr.shape,))
        arr.setflags(write=False)
        self._bits = arr

    @property
    def bits(self):
        return self._bits

    @property
    def width(self):
        return self._bits.shape[1]

    @property
    def height(self):
        return self._bits.shape[0]


class EnvironmentMap:
    """Static (always opaque) and dynamic (sometimes present) occupancy."""

    def __init__(self, static, dynamic, h_x=1.0, h_y=1.0):
        s = np.array(static, dtype=bool)
        d = np.array(dynamic, dtype=bool)
        if s.ndim != 2 or d.ndim != 2 or s.shape != d.shape:
            raise ShapeMismatchError("static/dynamic shapes differ: %r vs %r"
                                     % (s.shape, d.shape))
        _check_spacing(h_x, h_y)
        if (s & d).any():
            raise ValueError("a cell cannot be both static and dynamic")
        s.setflags(write=False)
        d.setflags(write=False)
        self.static = s
        self.dynamic = d
        self.h_x = float(h_x)
        self.h_y = float(h_y)

    @property
    def width(self):
        return self.static.shape[1]

    @property
    def height(self):
        return self.static.shape[0]


@dataclass(frozen=True)
class BsConfig:
    """Transmitter placement and radio parameters (meters, dBm, Hz)."""

    x: float
    y: float
    z: float = 1.5
    tx_power_dbm: float = 23.0
    carrier_hz: float = 5.9e9

    def __post_init__(self):
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.z <= 0:
            raise ValueError("antenna height must be positive")


def field_map(field, fn, unit=None):
    """Apply a scalar function to every pixel, preserving geometry.

    The unit tag of the result defaults to the input's; pass ``unit`` when
    the function changes the physical meaning of the values.
    """
    out = np.empty((field.height, field.width), dtype=np.float64)
    for (j, i), v in np.ndenumerate(field.data):
        out[j, i] = fn(v)
    return ScalarField(out, h_x=field.h_x, h_y=field.h_y,
                       unit=field.unit if unit is None else unit)


def amplitude_from_power(power, eps=0.0):
    """Pixelwise square root of a linear-power map.

    Accepts a ScalarField tagged LINEAR_POWER or a raw array.  Values in
    [-eps, 0) are treated as rounding noise and clamped to zero; anything
    below -eps raises.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if isinstance(power, ScalarField):
        if power.unit is not UnitTag.LINEAR_POWER:
            raise ValueError("expected a LINEAR_POWER field, got %s"
                             % power.unit.value)
        arr = power.data
        h_x, h_y = power.h_x, power.h_y
    else:
        arr = np.asarray(power, dtype=np.float64)
        h_x = h_y = 1.0
    if arr.size and arr.min() < -eps:
        raise ValueError("power values below -eps; refusing to sqrt")
    amp = np.sqrt(np.maximum(arr, 0.0))
    return ScalarField(amp, h_x=h_x, h_y=h_y, unit=UnitTag.AMPLITUDE)
