"""Classical propagator of the driven oscillator and its cocycle identities.

The linear system is ``d/dt (p, x) = [[0, -f], [1, 0]] (p, x)`` with
``f(t) = E - V(theta + omega t)``. Propagators act on ``(p; x)``.

Integration uses fixed-step RK4. Each step of a linear system is itself a
2x2 matrix, so all step matrices of a time block are built at once with numpy
and multiplied by pairwise (tree) reduction. Drivings without active terms
are propagated with the exact matrix exponential instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hull import DrivingSpec, flow, torus_distance
from .weyl import symplectic_deviation

_CHUNK_STEPS = 1 << 17


class IntegrationError(RuntimeError):
    pass


class StabilityError(IntegrationError):
    pass


class EndpointMismatch(ValueError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``substeps`` splits every renormalisation interval into sampling blocks;
    estimators record one sample per block.
    """

    step: float = 1e-3
    renorm_interval: float = 1.0
    substeps: int = 8
    method: str = "rk4"

    def __post_init__(self):
        if not (self.step > 0 and self.renorm_interval > 0):
            raise ValueError("step and renorm_interval must be positive")
        if self.step > self.renorm_interval:
            raise ValueError("step must not exceed renorm_interval")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}; only 'rk4' is available")

    @property
    def block(self) -> float:
        return self.renorm_interval / self.substeps

    def check_stability(self, spec: DrivingSpec):
        bound = spec.f_bound()
        if self.step * bound > 0.1:
            raise StabilityError(
                f"step {self.step:g} too large for max|f| <= {bound:g} (need step*max|f| <= 0.1)"
            )


DEFAULT_CONFIG = IntegratorConfig()


def closed_form_propagator(f: float, dt) -> np.ndarray:
    """Exact propagator over ``dt`` for constant stiffness ``f``.

    ``dt`` may be an array; the result then has shape ``dt.shape + (2, 2)``.
    """
    dt = np.asarray(dt, dtype=float)
    out = np.empty(dt.shape + (2, 2))
    if f > 0:
        w = math.sqrt(f)
        c = np.cos(w * dt)
        s_over_w = dt * np.sinc(w * dt / np.pi)
        out[..., 0, 0] = c
        out[..., 0, 1] = -f * s_over_w
        out[..., 1, 0] = s_over_w
        out[..., 1, 1] = c
    elif f < 0:
        k = math.sqrt(-f)
        x = k * dt
        c = np.cosh(x)
        with np.errstate(invalid="ignore", divide="ignore"):
            sh_over_k = np.where(x == 0, dt, np.sinh(x) / k)
        out[..., 0, 0] = c
        out[..., 0, 1] = -f * sh_over_k
        out[..., 1, 0] = sh_over_k
        out[..., 1, 1] = c
    else:
        out[..., 0, 0] = 1.0
        out[..., 0, 1] = 0.0
        out[..., 1, 0] = dt
        out[..., 1, 1] = 1.0
    return out


def _generator(f: np.ndarray) -> np.ndarray:
    A = np.zeros(f.shape + (2, 2))
    A[..., 0, 1] = -f
    A[..., 1, 0] = 1.0
    return A


def rk4_step_matrices(f0, fm, f1, h) -> np.ndarray:
    """One-step RK4 maps for ``y' = A(f) y`` given ``f`` at start, midpoint and end."""
    A0, Am, A1 = _generator(np.asarray(f0)), _generator(np.asarray(fm)), _generator(np.asarray(f1))
    eye = np.eye(2)
    B1 = eye + 0.5 * h * A0
    K2 = Am @ B1
    B2 = eye + 0.5 * h * K2
    K3 = Am @ B2
    B3 = eye + h * K3
    K4 = A1 @ B3
    return eye + (h / 6.0) * (A0 + 2.0 * K2 + 2.0 * K3 + K4)


def chain(mats: np.ndarray) -> np.ndarray:
    """Ordered product ``M[n-1] @ ... @ M[0]`` along axis -3, by pairwise reduction."""
    mats = np.asarray(mats)
    while mats.shape[-3] > 1:
        if mats.shape[-3] % 2:
            pad = np.broadcast_to(np.eye(2), mats.shape[:-3] + (1, 2, 2))
            mats = np.concatenate([mats, pad], axis=-3)
        mats = mats[..., 1::2, :, :] @ mats[..., 0::2, :, :]
    return mats[..., 0, :, :]


def _rk4_blocks(spec: DrivingSpec, theta, starts: np.ndarray, length: float, step: float) -> np.ndarray:
    """RK4 propagators over ``[s, s + length]`` for every start ``s``; all blocks equal length."""
    n = max(1, math.ceil(abs(length) / step - 1e-9))
    h = length / n
    per_chunk = max(1, _CHUNK_STEPS // n)
    out = np.empty((starts.size, 2, 2))
    offsets = h * np.arange(n)
    for lo in range(0, starts.size, per_chunk):
        s = starts[lo:lo + per_chunk, None] + offsets
        f0 = spec.f_along(theta, s)
        fm = spec.f_along(theta, s + 0.5 * h)
        f1 = spec.f_along(theta, s + h)
        out[lo:lo + per_chunk] = chain(rk4_step_matrices(f0, fm, f1, h))
    return out


def block_propagators(spec: DrivingSpec, theta, t0: float, t1: float, block: float,
                      cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Propagators over consecutive blocks of ``[t0, t1]``.

    Returns ``(times, mats)`` with ``times[0] = t0``, ``times[-1] = t1`` and
    ``mats[j] = F(times[j+1], times[j])``. The last block may be shorter.
    Backward intervals (``t1 < t0``) are integrated with a negative step.
    """
    cfg.check_stability(spec)
    span = t1 - t0
    if span == 0:
        return np.array([t0]), np.empty((0, 2, 2))
    sign = 1.0 if span > 0 else -1.0
    nfull = int(math.floor(abs(span) / block * (1 + 1e-12)))
    rest = abs(span) - nfull * block
    if rest <= 1e-12 * max(1.0, abs(span)) and nfull:
        rest = 0.0
    starts = t0 + sign * block * np.arange(nfull)
    times = t0 + sign * block * np.arange(nfull + 1)
    if rest:
        times = np.append(times, t1)
    times[-1] = t1
    pieces = []
    if spec.is_constant():
        f = spec.constant_f()
        if nfull:
            pieces.append(np.broadcast_to(closed_form_propagator(f, sign * block), (nfull, 2, 2)))
        if rest:
            pieces.append(closed_form_propagator(f, sign * rest)[None])
    else:
        if nfull:
            pieces.append(_rk4_blocks(spec, theta, starts, sign * block, cfg.step))
        if rest:
            pieces.append(_rk4_blocks(spec, theta, np.array([t0 + sign * block * nfull]), sign * rest, cfg.step))
    mats = np.concatenate(pieces, axis=0)
    if not np.all(np.isfinite(mats)):
        raise IntegrationError("non-finite values during integration")
    return times, mats


def rk4_propagator(spec: DrivingSpec, theta, t0: float, t1: float, step: float) -> np.ndarray:
    """Plain RK4 propagator over ``[t0, t1]``, also for constant drivings."""
    if t1 == t0:
        return np.eye(2)
    return _rk4_blocks(spec, theta, np.array([float(t0)]), float(t1 - t0), step)[0]


@dataclass(frozen=True)
class CocycleSegment:
    F: np.ndarray
    t0: float
    t1: float
    theta: np.ndarray

    def __post_init__(self):
        F = np.array(self.F, dtype=float)
        F.flags.writeable = False
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        theta.flags.writeable = False
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "theta", theta)

    def deviation(self) -> float:
        return symplectic_deviation(self.F)


def ordered_product(mats: np.ndarray) -> np.ndarray:
    F = np.eye(2)
    for M in mats:
        F = M @ F
    return F


def integrate_cocycle(spec: DrivingSpec, theta, t0: float, t1: float,
                      cfg: IntegratorConfig = DEFAULT_CONFIG) -> CocycleSegment:
    """``F(t1, t0; theta)``; renormalisation-interval blocks multiplied in order."""
    if spec.omega.size != np.atleast_1d(theta).size:
        raise ValueError("hull point dimension does not match the driving")
    _, mats = block_propagators(spec, theta, t0, t1, cfg.renorm_interval, cfg)
    F = ordered_product(mats)
    if not np.all(np.isfinite(F)):
        raise IntegrationError("propagator overflowed; use the log-space estimators for long horizons")
    return CocycleSegment(F, t0, t1, theta)


def compose(later: CocycleSegment, earlier: CocycleSegment, atol: float = 1e-12) -> CocycleSegment:
    if abs(later.t0 - earlier.t1) > atol * max(1.0, abs(later.t0)):
        raise EndpointMismatch(f"later segment starts at {later.t0}, earlier ends at {earlier.t1}")
    if torus_distance(later.theta, earlier.theta) > atol:
        raise EndpointMismatch("segments belong to different hull points")
    return CocycleSegment(later.F @ earlier.F, earlier.t0, later.t1, earlier.theta)


def skew_shift_residual(spec: DrivingSpec, theta, t: float, t0: float, tau: float,
                        cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """``|F(t+tau, t0+tau; theta) - F(t, t0; phi^tau theta)|_inf``."""
    shifted = integrate_cocycle(spec, theta, t0 + tau, t + tau, cfg).F
    moved = integrate_cocycle(spec, flow(theta, tau, spec.omega), t0, t, cfg).F
    return float(np.max(np.abs(shifted - moved)))
