"""Fidelity metrics for reconstructed maps and outline masks.

Scalar metrics accept ScalarField or plain arrays.  The two mask metrics
compare outlines with a distance tolerance: a pixel counts as matched when
the opposite mask comes within ``tol`` pixels (Euclidean, in index space).
"""

import math

import numpy as np
from scipy import ndimage

from .grids import ScalarField, ShapeMismatchError


def _data(x):
    return x.data if isinstance(x, ScalarField) else np.asarray(x, dtype=np.float64)


def _pair(pred, gt):
    p = _data(pred)
    g = _data(gt)
    if p.shape != g.shape:
        raise ShapeMismatchError("shapes %r vs %r" % (p.shape, g.shape))
    return p, g


def nmse(pred, gt):
    """Squared error normalized by the energy of the ground truth."""
    p, g = _pair(pred, gt)
    denom = np.sum(g ** 2)
    if denom == 0.0:
        raise ValueError("ground truth has zero energy")
    return float(np.sum((p - g) ** 2) / denom)


def rmse(pred, gt):
    p, g = _pair(pred, gt)
    return float(math.sqrt(np.mean((p - g) ** 2)))


def ssim_global(pred, gt, L=1.0):
    """Single-window SSIM over the whole image with population statistics."""
    p, g = _pair(pred, gt)
    c1 = (0.01 * L) ** 2
    c2 = (0.03 * L) ** 2
    mp, mg = p.mean(), g.mean()
    vp, vg = p.var(), g.var()
    cov = ((p - mp) * (g - mg)).mean()
    return float(((2 * mp * mg + c1) * (2 * cov + c2))
                 / ((mp ** 2 + mg ** 2 + c1) * (vp + vg + c2)))


def psnr(pred, gt, peak=1.0):
    """Peak signal-to-noise ratio in dB; identical inputs give math.inf."""
    p, g = _pair(pred, gt)
    mse = np.mean((p - g) ** 2)
    if mse == 0.0:
        return math.inf
    return float(10.0 * math.log10(peak * peak / mse))


def _distance_to(mask_bits):
    # Euclidean distance from every pixel to the nearest True pixel;
    # only meaningful when the mask is nonempty.
    return ndimage.distance_transform_edt(~mask_bits)


def dtc(pred, gt, tol=3.0):
    """Fraction of ground-truth pixels within ``tol`` of the prediction.

    Empty ground truth counts as a perfect score (nothing was missed);
    an empty prediction against a nonempty truth scores zero.
    """
    g = gt.bits
    p = pred.bits
    if not g.any():
        return 1.0
    if not p.any():
        return 0.0
    dist_to_pred = _distance_to(p)
    return float((dist_to_pred[g] <= tol).mean())


def dtiou(pred, gt, tol=3.0):
    """Tolerance-relaxed IoU: matched union pixels over all union pixels.

    A union pixel is matched when it belongs to one mask and lies within
    ``tol`` of the other.  Two empty masks agree perfectly.
    """
    p = pred.bits
    g = gt.bits
    union = p | g
    if not union.any():
        return 1.0
    near_g = (_distance_to(g) <= tol) if g.any() else np.zeros_like(g)
    near_p = (_distance_to(p) <= tol) if p.any() else np.zeros_like(p)
    matched = (p & near_g) | (g & near_p)
    return float(matched.sum() / union.sum())
