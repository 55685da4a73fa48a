"""Curvature-based obstacle indicators for amplitude maps.

The central quantity is the normalized stencil curvature -lap(A)/(A+eps).
For a field that locally behaves like exp(-gamma*r)/r this is negative
(evanescent decay), for propagating oscillation it is positive, so a strict
sign test on the map traces obstacle outlines.  A log-domain variant is
invariant to global gain, and intersecting its outlines across several
smoothing scales suppresses speckle that only shows up at one scale.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grids import Boundary, OutlineMask, ScalarField, UnitTag

_PAD_MODE = {
    Boundary.REPLICATE: "edge",
    Boundary.MIRROR: "reflect",
    Boundary.ZERO: "constant",
}


@dataclass(frozen=True)
class HelmholtzParams:
    """Settings shared by the indicator maps.

    eps       regularizer added to denominators; None picks 1e-6 * max(A)
    sigma     Gaussian pre-smoothing width in pixels (0 disables)
    scales    smoothing widths intersected by the persistence mask
    boundary  padding rule for smoothing and stencils
    """

    eps: float = None
    sigma: float = 1.0
    scales: tuple = (0.5, 1.0, 2.0)
    boundary: Boundary = Boundary.REPLICATE

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.eps is not None and self.eps < 0:
            raise ValueError("eps must be non-negative")
        if any(s < 0 for s in self.scales):
            raise ValueError("scales must be non-negative")


def _resolve_eps(params, data):
    if params.eps is not None:
        return params.eps
    return 1e-6 * float(data.max()) if data.size else 0.0


def gaussian_smooth(field, sigma, boundary=Boundary.REPLICATE):
    """Separable Gaussian blur, kernel truncated at ceil(3*sigma) taps/side."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return field
    radius = math.ceil(3.0 * sigma)
    taps = np.exp(-0.5 * (np.arange(-radius, radius + 1) / sigma) ** 2)
    taps /= taps.sum()
    mode = _PAD_MODE[boundary]
    padded = np.pad(field.data, ((0, 0), (radius, radius)), mode=mode)
    rows = kernels.convolve_rows(np.ascontiguousarray(padded), taps)
    padded = np.pad(rows.T, ((0, 0), (radius, radius)), mode=mode)
    out = kernels.convolve_rows(np.ascontiguousarray(padded), taps).T
    return ScalarField(out, h_x=field.h_x, h_y=field.h_y, unit=field.unit)


def laplacian_5pt(field, boundary=Boundary.REPLICATE):
    """Anisotropic 5-point Laplacian; spacing is taken from the field."""
    data = field.data
    if data.shape[0] < 3 or data.shape[1] < 3:
        raise ValueError("need at least a 3x3 grid for the 5-point stencil")
    padded = np.pad(data, 1, mode=_PAD_MODE[boundary])
    out = kernels.laplacian_padded(padded, 1.0 / field.h_x ** 2,
                                   1.0 / field.h_y ** 2)
    return ScalarField(out, h_x=field.h_x, h_y=field.h_y,
                       unit=UnitTag.K_SQUARED)


def k_eff_map(amplitude, params):
    """Normalized curvature -lap(S)/(S+eps) of the smoothed amplitude S."""
    if amplitude.unit is not UnitTag.AMPLITUDE:
        raise ValueError("expected an AMPLITUDE field, got %s"
                         % amplitude.unit.value)
    s = gaussian_smooth(amplitude, params.sigma, params.boundary)
    lap = laplacian_5pt(s, params.boundary)
    eps = _resolve_eps(params, amplitude.data)
    return ScalarField(-lap.data / (s.data + eps), h_x=amplitude.h_x,
                       h_y=amplitude.h_y, unit=UnitTag.K_SQUARED)


def k_log_map(amplitude, params):
    """Curvature of the smoothed log-amplitude; invariant to global gain.

    A constant gain only shifts log(A), and the stencil annihilates the
    shift, so the sign map is unchanged (up to rounding noise near zero
    crossings).
    """
    if amplitude.unit is not UnitTag.AMPLITUDE:
        raise ValueError("expected an AMPLITUDE field, got %s"
                         % amplitude.unit.value)
    eps = _resolve_eps(params, amplitude.data)
    logf = ScalarField(np.log(amplitude.data + eps), h_x=amplitude.h_x,
                       h_y=amplitude.h_y, unit=UnitTag.LOG_AMPLITUDE)
    s = gaussian_smooth(logf, params.sigma, params.boundary)
    lap = laplacian_5pt(s, params.boundary)
    return ScalarField(-lap.data, h_x=amplitude.h_x, h_y=amplitude.h_y,
                       unit=UnitTag.K_SQUARED)


def outline_mask(k2, threshold=0.0):
    """Pixels where the indicator is strictly below the threshold."""
    return OutlineMask(k2.data < threshold)


def persistence_mask(amplitude, params):
    """AND of log-curvature outlines across params.scales."""
    if not params.scales:
        raise ValueError("need at least one scale")
    bits = None
    for s in params.scales:
        p = HelmholtzParams(eps=params.eps, sigma=s, scales=params.scales,
                            boundary=params.boundary)
        b = outline_mask(k_log_map(amplitude, p)).bits
        bits = b if bits is None else bits & b
    return OutlineMask(bits)


def _wrap_angle(d):
    """Map angle differences into (-pi, pi]."""
    return np.pi - np.mod(np.pi - d, 2.0 * np.pi)


def phase_gradient_sq(u, params):
    """Squared phase gradient via chord-length differences.

    Each one-sided wrapped phase step d contributes (2 - 2*cos(d))/h^2 --
    the squared chord rather than the squared arc -- averaged over the
    forward and backward steps.  On a discrete plane wave this reproduces
    the stencil dispersion (2 - 2*cos(k*h))/h^2 exactly, so the sum with
    the amplitude-curvature term is consistent with the 5-point stencil.
    ``params`` is accepted for symmetry with the other maps; phase is a
    cyclic quantity and is not pre-smoothed.
    """
    phi = np.angle(u.data)
    fx = np.zeros_like(phi)
    fx[:, :-1] = _wrap_angle(phi[:, 1:] - phi[:, :-1])
    bx = np.zeros_like(phi)
    bx[:, 1:] = fx[:, :-1]
    fy = np.zeros_like(phi)
    fy[:-1, :] = _wrap_angle(phi[1:, :] - phi[:-1, :])
    by = np.zeros_like(phi)
    by[1:, :] = fy[:-1, :]
    gx = ((2.0 - 2.0 * np.cos(fx)) + (2.0 - 2.0 * np.cos(bx))) / (2.0 * u.h_x ** 2)
    gy = ((2.0 - 2.0 * np.cos(fy)) + (2.0 - 2.0 * np.cos(by))) / (2.0 * u.h_y ** 2)
    return ScalarField(gx + gy, h_x=u.h_x, h_y=u.h_y, unit=UnitTag.K_SQUARED)


def amplitude_curvature_term(u, params):
    """The -lap(|u|)/(|u|+eps) part of the amplitude-phase split."""
    a = ScalarField(np.abs(u.data), h_x=u.h_x, h_y=u.h_y,
                    unit=UnitTag.AMPLITUDE)
    return k_eff_map(a, params)


def k2_from_amp_phase(u, params):
    """Effective squared wavenumber of a complex field.

    Exactly the sum of phase_gradient_sq and amplitude_curvature_term, so
    callers can split the map back into its two contributions.
    """
    gsq = phase_gradient_sq(u, params)
    curv = amplitude_curvature_term(u, params)
    return ScalarField(gsq.data + curv.data, h_x=u.h_x, h_y=u.h_y,
                       unit=UnitTag.K_SQUARED)


def helmholtz_radial_residual(r, u, k):
    """Max |u'' + (2/r) u' + k^2 u| over interior samples of a radial profile.

    Derivatives are central differences, so the residual of an exact
    solution shrinks as h^2.  Radii must be strictly increasing and at
    least three samples long.
    """
    r = np.asarray(r, dtype=np.float64)
    u = np.asarray(u)
    if r.ndim != 1 or u.shape != r.shape:
        raise ValueError("r and u must be 1-D arrays of equal length")
    if r.size < 3:
        raise ValueError("need at least three samples")
    if np.any(np.diff(r) <= 0):
        raise ValueError("radii must be strictly increasing")
    span = r[2:] - r[:-2]
    h = span / 2.0
    d2 = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h ** 2
    d1 = (u[2:] - u[:-2]) / span
    res = d2 + (2.0 / r[1:-1]) * d1 + (k * k) * u[1:-1]
    return float(np.max(np.abs(res)))
