"""Constant-drift diffusion with a one-step-invertible forward law.

Forward: x_t = (1-t)*x0 + sqrt(t)*eps with drift target f = -x0, so a
predictor pair (f_hat, eps_hat) recovers x0 in closed form from any t:
z0 = x_t - t*f_hat - sqrt(t)*eps_hat.  The reverse chain steps t -> t-dt
with the matching Gaussian transition (variance dt*(t-dt)/t), which makes
the two-stage sampler below exact when the predictors are exact.
"""

import math
from dataclasses import dataclass

import numpy as np

from .grids import OutlineMask, ScalarField, ShapeMismatchError, UnitTag


@dataclass
class DiffusionState:
    """A sample x at diffusion time t in [0, 1]."""

    t: float
    x: np.ndarray


@dataclass
class PredictorOutput:
    """Model outputs at one diffusion time: drift f_hat and noise eps_hat."""

    f_hat: np.ndarray
    eps_hat: np.ndarray


def _as_float(a):
    return np.asarray(a, dtype=np.float64)


def _check_shapes(x, pred):
    f = _as_float(pred.f_hat)
    e = _as_float(pred.eps_hat)
    if f.shape != x.shape or e.shape != x.shape:
        raise ShapeMismatchError("predictor shapes %r/%r do not match state %r"
                                 % (f.shape, e.shape, x.shape))
    return f, e


def forward_sample(x0, t, rng):
    """Draw x_t = (1-t)*x0 + sqrt(t)*eps for a fresh standard normal eps."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1], got %r" % (t,))
    x0 = _as_float(x0)
    eps = rng.standard_normal(x0.shape)
    return DiffusionState(t=float(t), x=(1.0 - t) * x0 + math.sqrt(t) * eps)


def reverse_step(state, pred, dt, rng):
    """One reverse transition t -> t-dt given predictors at time t.

    The posterior of x_{t-dt} given x_t and x0 is Gaussian with variance
    dt*(t-dt)/t; a full step (dt == t) is deterministic and lands exactly
    on the predictor-implied x0.
    """
    x = _as_float(state.x)
    f, e = _check_shapes(x, pred)
    t = state.t
    if not 0.0 < dt <= t:
        raise ValueError("dt must lie in (0, t], got dt=%r at t=%r" % (dt, t))
    mean = x - dt * f - (dt / math.sqrt(t)) * e
    var = dt * (t - dt) / t
    if var > 0.0:
        mean = mean + math.sqrt(var) * rng.standard_normal(x.shape)
    return DiffusionState(t=t - dt, x=mean)


def one_step_reconstruct(state, pred):
    """Closed-form x0 estimate z0 = x - t*f_hat - sqrt(t)*eps_hat."""
    x = _as_float(state.x)
    f, e = _check_shapes(x, pred)
    if state.t <= 0.0:
        raise ValueError("reconstruction needs t > 0")
    return x - state.t * f - math.sqrt(state.t) * e


def loss_drift(f_hat, x0):
    """Mean squared error of the drift head against its target -x0."""
    f = _as_float(f_hat)
    x = _as_float(x0)
    if f.shape != x.shape:
        raise ShapeMismatchError("shapes %r vs %r" % (f.shape, x.shape))
    return float(np.mean((f + x) ** 2))


def loss_noise(eps_hat, eps):
    f = _as_float(eps_hat)
    e = _as_float(eps)
    if f.shape != e.shape:
        raise ShapeMismatchError("shapes %r vs %r" % (f.shape, e.shape))
    return float(np.mean((f - e) ** 2))


def loss_recon(z0_hat, x0):
    z = _as_float(z0_hat)
    x = _as_float(x0)
    if z.shape != x.shape:
        raise ShapeMismatchError("shapes %r vs %r" % (z.shape, x.shape))
    return float(np.mean((z - x) ** 2))


def loss_total(l_drift, l_noise, l_recon, lambdas=(1.0, 1.0, 1.0)):
    """Weighted sum of the three training terms."""
    return float(lambdas[0] * l_drift + lambdas[1] * l_noise
                 + lambdas[2] * l_recon)


def ddpm_score_from_denoiser(eps_hat, alpha_bar):
    """Score of the DDPM marginal implied by a noise prediction."""
    if not 0.0 <= alpha_bar < 1.0:
        raise ValueError("alpha_bar must lie in [0, 1), got %r" % (alpha_bar,))
    return -_as_float(eps_hat) / math.sqrt(1.0 - alpha_bar)


def _posterior_stats(mu0, var0, x, t):
    # precision-weighted blend of the N(mu0, var0) prior with the
    # observation x_t = (1-t)*x0 + sqrt(t)*eps
    prec = 1.0 / var0 + (1.0 - t) ** 2 / t
    mean = (mu0 / var0 + (1.0 - t) * x / t) / prec
    return mean, 1.0 / prec


def _check_time(t):
    if not 0.0 < t <= 1.0:
        raise ValueError("denoiser time must lie in (0, 1], got %r" % (t,))


def _predictors_for(x, t, x0):
    return PredictorOutput(f_hat=-x0, eps_hat=(x - (1.0 - t) * x0) / math.sqrt(t))


def gaussian_oracle_denoiser(mu0, var0):
    """Exact posterior-mean predictors for a N(mu0, var0) data distribution.

    Deterministic plug-in: reverse chains driven by it come out slightly
    under-dispersed because the posterior spread around the mean is dropped.
    """
    if var0 <= 0:
        raise ValueError("var0 must be positive")

    def den(x, t):
        _check_time(t)
        x = _as_float(x)
        mean, _ = _posterior_stats(mu0, var0, x, t)
        return _predictors_for(x, t, mean)

    return den


def gaussian_posterior_sampler(mu0, var0, rng):
    """Posterior-sampling variant: draws x0* ~ p(x0 | x_t) each call.

    Feeding the drawn x0* back as exact predictors makes the reverse chain
    reproduce the true reverse-time mixture, so terminal moments match the
    data distribution exactly (up to Monte-Carlo error).
    """
    if var0 <= 0:
        raise ValueError("var0 must be positive")

    def den(x, t):
        _check_time(t)
        x = _as_float(x)
        mean, var = _posterior_stats(mu0, var0, x, t)
        draw = mean + math.sqrt(var) * rng.standard_normal(x.shape)
        return _predictors_for(x, t, draw)

    return den


def target_oracle_denoiser(target):
    """Predictors of a denoiser that always believes x0 == target."""
    tgt = _as_float(target)

    def den(x, t):
        _check_time(t)
        return _predictors_for(_as_float(x), t, tgt)

    return den


def sample_reverse(denoiser, x1, steps, rng):
    """Run the reverse chain from x at t=1 down to t=0.

    ``steps`` is either a positive integer (uniform schedule) or a list of
    positive dts summing to 1.  Times are recomputed from the schedule each
    iteration rather than accumulated, so the final step always sees
    dt == t exactly and the chain terminates on the noise-free branch.
    """
    x = _as_float(x1)
    if isinstance(steps, (int, np.integer)):
        n = int(steps)
        if n < 1:
            raise ValueError("steps must be a positive integer")
        for k in range(n):
            t = (n - k) / n
            dt = t - (n - k - 1) / n
            pred = denoiser(x, t)
            x = reverse_step(DiffusionState(t=t, x=x), pred, dt=dt, rng=rng).x
    else:
        dts = [float(d) for d in steps]
        if not dts or any(d <= 0.0 for d in dts):
            raise ValueError("step sizes must be positive")
        if abs(math.fsum(dts) - 1.0) > 1e-9:
            raise ValueError("step sizes must sum to 1")
        for i, dt in enumerate(dts):
            t = math.fsum(dts[i:])
            pred = denoiser(x, t)
            x = reverse_step(DiffusionState(t=t, x=x), pred, dt=dt, rng=rng).x
    return x


def run_two_stage(env, bs, stage1, stage2, steps, rng):
    """Outline-then-map sampling on the geometry of ``env``.

    Stage one denoises toward an outline indicator (thresholded at 0.5),
    stage two toward the normalized map.  Returns (OutlineMask,
    ScalarField); ``bs`` rides along for conditioning-aware denoisers.
    """
    if isinstance(steps, (int, np.integer)) and steps < 1:
        raise ValueError("steps must be a positive integer")
    shape = (env.height, env.width)
    x1 = rng.standard_normal(shape)
    outline = sample_reverse(stage1, x1, steps, rng)
    x1 = rng.standard_normal(shape)
    field = sample_reverse(stage2, x1, steps, rng)
    mask = OutlineMask(outline >= 0.5)
    return mask, ScalarField(field, h_x=env.h_x, h_y=env.h_y,
                             unit=UnitTag.NORMALIZED_GRAY)
