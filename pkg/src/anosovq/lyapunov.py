"""Classical and quantum Lyapunov exponents of the driven oscillator.

The quantum exponent of a direction ``a`` with respect to ``A = W(beta)`` is
the growth rate of ``|sigma(a(t), beta)|`` where ``a(t)`` is the push-forward
of ``a`` by the cocycle (the coefficients of ``U(t,t0) L_a U(t,t0)^dag``).
A limsup cannot be computed, so every exponent is the least-squares slope of
a log-amplitude over the tail window ``[horizon/2, horizon]``. Vectors are
renormalised after every block and the growth is accumulated in log-space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .cocycle import DEFAULT_CONFIG, IntegratorConfig, block_propagators
from .hull import DrivingSpec
from .weyl import Direction, WeylLabel, ray_angle

DEFAULT_BETA = Direction.of(1.0, 1.0)
MIN_SAMPLES = 10
BATCHES = 8
# generic starting vector in (p; x)
_GENERIC = np.array([math.cos(0.3719), math.sin(0.3719)])


class EstimationError(RuntimeError):
    pass


class DegenerateLabelError(EstimationError):
    pass


class NonHyperbolicError(EstimationError):
    pass


class SplittingError(EstimationError):
    pass


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    horizon: float
    window: tuple
    slope_stderr: float
    samples: np.ndarray = field(repr=False)
    ols_stderr: float = float("nan")

    def within(self, target: float, tol: float) -> bool:
        return abs(self.value - target) <= tol


@dataclass(frozen=True)
class DirectionProfile:
    t0: float
    directions: tuple
    exponents: tuple
    stable_index: int | None = None
    note: str | None = None

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.exponents])

    def unstable_values(self) -> np.ndarray:
        return np.array([e.value for i, e in enumerate(self.exponents) if i != self.stable_index])


def tail_regression(samples: np.ndarray, horizon: float, batches: int = BATCHES) -> LyapunovEstimate:
    """Slope of ``samples[:, 1]`` against ``samples[:, 0]`` over ``[horizon/2, horizon]``.

    The reported uncertainty is a batch-means standard error: the window is
    cut into ``batches`` consecutive pieces, each fitted separately, and the
    spread of those slopes is used. Log-norms of bounded solutions oscillate
    deterministically, so plain regression errors (which assume independent
    residuals) understate the uncertainty by an order of magnitude.
    """
    samples = np.asarray(samples, dtype=float)
    lo = 0.5 * horizon
    tail = samples[(samples[:, 0] >= lo - 1e-9) & np.isfinite(samples[:, 1])]
    if tail.shape[0] < MIN_SAMPLES:
        raise EstimationError(f"degenerate regression: {tail.shape[0]} samples in the tail window")
    if not np.all(np.isfinite(tail)):
        raise EstimationError("non-finite growth")
    fit = stats.linregress(tail[:, 0], tail[:, 1])
    k = min(batches, tail.shape[0] // 2)
    slopes = [stats.linregress(c[:, 0], c[:, 1]).slope for c in np.array_split(tail, k)]
    stderr = float(np.std(slopes, ddof=1) / math.sqrt(k))
    return LyapunovEstimate(float(fit.slope), float(horizon), (float(tail[0, 0]), float(tail[-1, 0])),
                            stderr, samples, float(fit.stderr))


def _adjugate_transpose(mats: np.ndarray) -> np.ndarray:
    """``(F^-1)^T`` for 2x2 unimodular ``F``: ``[[d, -c], [-b, a]]``."""
    out = np.empty_like(mats)
    out[:, 0, 0] = mats[:, 1, 1]
    out[:, 0, 1] = -mats[:, 1, 0]
    out[:, 1, 0] = -mats[:, 0, 1]
    out[:, 1, 1] = mats[:, 0, 0]
    return out


def propagate_log(mats: np.ndarray, vectors: np.ndarray):
    """Apply ``mats`` in order to the columns of ``vectors`` with renormalisation.

    Returns ``(units, logs)``: ``units[j]`` are the unit columns after block
    ``j`` and ``logs[j]`` the accumulated log-norms (initial norm included).
    """
    v = np.array(vectors, dtype=float, copy=True)
    if v.ndim == 1:
        v = v[:, None]
    norms = np.linalg.norm(v, axis=0)
    v = v / norms
    acc = np.log(norms)
    units = np.empty((mats.shape[0],) + v.shape)
    logs = np.empty((mats.shape[0], v.shape[1]))
    for j, M in enumerate(mats):
        v = M @ v
        nv = np.linalg.norm(v, axis=0)
        if not np.all(np.isfinite(nv)) or np.any(nv == 0):
            raise EstimationError("non-finite growth")
        v = v / nv
        acc = acc + np.log(nv)
        units[j] = v
        logs[j] = acc
    return units, logs


def classical_lyapunov(spec: DrivingSpec, theta, horizon: float,
                       cfg: IntegratorConfig = DEFAULT_CONFIG, t0: float = 0.0,
                       initial=None) -> LyapunovEstimate:
    """Growth rate of ``(1/2) ln(p^2 + x^2)`` for a generic solution."""
    times, mats = block_propagators(spec, theta, t0, t0 + horizon, cfg.block, cfg)
    w = _GENERIC if initial is None else np.asarray(initial, dtype=float)
    _, logs = propagate_log(mats, w)
    samples = np.column_stack([times[1:] - t0, logs[:, 0]])
    return tail_regression(samples, horizon)


def _pushforward_blocks(spec, theta, t0, horizon, cfg):
    times, mats = block_propagators(spec, theta, t0, t0 + horizon, cfg.block, cfg)
    return times, _adjugate_transpose(mats)


def _commutator_samples(times, pushed, vectors, beta: WeylLabel, t0: float, cfg: IntegratorConfig):
    """Per renormalisation interval, the max of ``ln|sigma(a(t), beta)|`` over its blocks.

    Returns ``(times, values)``, both of shape ``(intervals, directions)``.
    """
    units, logs = propagate_log(pushed, vectors)
    # sigma(a, beta) = a_x beta_p - a_p beta_x with a stacked as (p; x)
    sig = units[:, 1, :] * beta.alpha_p[0] - units[:, 0, :] * beta.alpha_x[0]
    with np.errstate(divide="ignore"):
        amp = np.log(np.abs(sig)) + logs
    elapsed = times[1:] - t0
    k = cfg.substeps
    nblk = -(-amp.shape[0] // k)
    pad = nblk * k - amp.shape[0]
    amp = np.vstack([amp, np.full((pad, amp.shape[1]), -np.inf)])
    elapsed = np.append(elapsed, np.full(pad, elapsed[-1]))
    # each sample is stamped with the time at which its interval maximum is attained
    grouped = amp.reshape(nblk, k, -1)
    idx = grouped.argmax(axis=1)
    rows = np.arange(nblk)[:, None]
    return elapsed.reshape(nblk, k)[rows, idx], grouped[rows, idx, np.arange(amp.shape[1])]


def _quantum_estimates(spec, theta, stacked_dirs, beta, t0, horizon, cfg):
    if beta.n != 1:
        raise ValueError("oscillator exponents are implemented for n = 1 only")
    times, pushed = _pushforward_blocks(spec, theta, t0, horizon, cfg)
    t_s, amp = _commutator_samples(times, pushed, stacked_dirs, beta, t0, cfg)
    out = []
    for col in range(amp.shape[1]):
        column = amp[:, col]
        if not np.any(np.isfinite(column)):
            raise DegenerateLabelError("commutator vanishes at every sample; beta is degenerate")
        out.append(tail_regression(np.column_stack([t_s[:, col], column]), horizon))
    return out


def quantum_lyapunov_along(spec: DrivingSpec, theta, a: Direction, beta: WeylLabel = DEFAULT_BETA,
                           t0: float = 0.0, horizon: float = 100.0,
                           cfg: IntegratorConfig = DEFAULT_CONFIG) -> LyapunovEstimate:
    """Growth rate of ``||[L_a(t0, t), W(beta)]|| = |sigma(a(t), beta)|``."""
    if a.n != beta.n:
        raise ValueError("direction and label dimensions differ")
    if a.norm() == 0:
        raise ValueError("direction must be nonzero")
    return _quantum_estimates(spec, theta, a.stacked()[:, None], beta, t0, horizon, cfg)[0]


def safe_horizon(lambda_c: float) -> float:
    """Time after which rounding noise in the unstable component dominates a decaying mode."""
    return 0.8 * math.log(1.0 / np.finfo(float).eps) / (2.0 * lambda_c)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    # stacked (p; x): prefer alpha_p < 0, i.e. the (-q_+, p_+) form with q_+ > 0
    pivot = v[0] if abs(v[0]) > 1e-12 else -v[1]
    return -v if pivot > 0 else v


def _adjoint_backward(mats: np.ndarray, nblocks: int):
    """Iterate ``w <- F_j^T w`` from block ``nblocks-1`` down to 0; returns (w, growth logs)."""
    w = _GENERIC.copy()
    logs = np.empty(nblocks)
    acc = 0.0
    for j, i in enumerate(range(nblocks - 1, -1, -1)):
        w = mats[i].T @ w
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0:
            raise EstimationError("non-finite growth")
        w = w / nw
        acc += math.log(nw)
        logs[j] = acc
    return w, logs


def _require_hyperbolic(spec, theta, t0, horizon, cfg) -> LyapunovEstimate:
    est = classical_lyapunov(spec, theta, horizon, cfg, t0=t0)
    if not est.value > 3.0 * est.slope_stderr:
        raise NonHyperbolicError(
            f"lambda_c = {est.value:.3g} is not resolved above 3*stderr = {3 * est.slope_stderr:.3g}"
        )
    return est


def stable_direction(spec: DrivingSpec, theta, t0: float = 0.0, horizon: float = 100.0,
                     cfg: IntegratorConfig = DEFAULT_CONFIG, angle_tol: float = 1e-6) -> Direction:
    """Unit direction whose commutator norm decays at rate ``lambda_c``.

    Found by backward power iteration of the adjoint cocycle ``F(t, t0)^T``
    over ``horizon`` and ``2 horizon``; both must agree within ``angle_tol``.
    """
    _require_hyperbolic(spec, theta, t0, horizon, cfg)
    times, mats = block_propagators(spec, theta, t0, t0 + 2.0 * horizon, cfg.renorm_interval, cfg)
    n_half = int(np.searchsorted(times, t0 + horizon - 1e-9)) if horizon > 0 else 0
    w_short, _ = _adjoint_backward(mats, n_half)
    w_long, _ = _adjoint_backward(mats, mats.shape[0])
    angle = ray_angle(w_short, w_long)
    if angle > angle_tol:
        raise SplittingError(f"stable direction not converged: angle {angle:.2e} between horizons")
    return Direction.from_stacked(_canonical_sign(w_long))


def stable_exponent(spec: DrivingSpec, theta, t0: float = 0.0, horizon: float = 100.0,
                    cfg: IntegratorConfig = DEFAULT_CONFIG) -> LyapunovEstimate:
    """Exponent of the stable direction, as minus the growth rate of the adjoint cocycle.

    A forward estimate along the stable direction is swamped by rounding
    noise in the unstable component after :func:`safe_horizon`.
    """
    times, mats = block_propagators(spec, theta, t0, t0 + horizon, cfg.block, cfg)
    _, logs = _adjoint_backward(mats, mats.shape[0])
    # elapsed backward time for each sample
    s = (times[-1] - times[:-1])[::-1]
    return tail_regression(np.column_stack([s, -logs]), horizon)


def _profile_directions(count: int):
    ang = 2.0 * np.pi * (np.arange(count) + 0.5) / count
    return [Direction.of(math.cos(a), math.sin(a)) for a in ang]


def direction_profile(spec: DrivingSpec, theta, t0: float = 0.0, count: int = 16,
                      horizon: float = 100.0, cfg: IntegratorConfig = DEFAULT_CONFIG,
                      beta: WeylLabel = DEFAULT_BETA) -> DirectionProfile:
    """Quantum exponents of ``count`` equally spaced unit directions, plus the stable one.

    The sample directions sit at half-step offsets ``2 pi (k + 1/2) / count``
    so that none of them coincides with a symmetric stable direction.
    """
    if count < 4:
        raise ValueError("count must be >= 4")
    dirs = _profile_directions(count)
    stacked = np.column_stack([d.stacked() for d in dirs])
    exps = _quantum_estimates(spec, theta, stacked, beta, t0, horizon, cfg)
    stable_index = None
    note = None
    try:
        a_s = stable_direction(spec, theta, t0, horizon, cfg)
    except (NonHyperbolicError, SplittingError) as exc:
        note = str(exc)
    else:
        dirs.append(a_s)
        exps.append(stable_exponent(spec, theta, t0, horizon, cfg))
        stable_index = count
    return DirectionProfile(t0, tuple(dirs), tuple(exps), stable_index, note)


def upper_lyapunov(spec: DrivingSpec, theta, t0: float = 0.0, horizon: float = 100.0,
                   cfg: IntegratorConfig = DEFAULT_CONFIG, count: int = 16,
                   beta: WeylLabel = DEFAULT_BETA) -> float:
    profile = direction_profile(spec, theta, t0, count, horizon, cfg, beta)
    return float(profile.values.max())
