"""Floquet reduction, skew Anosov direction fields and their verification.

For periodic driving the one-period propagator ``M`` is diagonalised,
``g(0) = [v_+, v_-]``, and the reduction frame is transported as
``g(t) = F(t, 0) g(0) exp(-t diag(lam_+, -lam_+))``. The stable and unstable
direction fields are the rows of ``g^-1`` read as coefficient vectors.
For quasi-periodic driving the fields are estimated by finite-time power
iteration along sampled orbits.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import DEFAULT_CONFIG, IntegratorConfig, block_propagators, integrate_cocycle
from .hull import DrivingSpec, flow, torus_distance, wrap
from .lyapunov import (
    NonHyperbolicError,
    SplittingError,
    _adjoint_backward,
    _adjugate_transpose,
    classical_lyapunov,
    propagate_log,
)
from .weyl import Direction, ray_angle, symplectic_form

TRACE_TOL = 1e-8


class ReductionError(RuntimeError):
    pass


class NotPeriodicError(ReductionError):
    pass


class ParabolicError(ReductionError):
    pass


class ConditioningError(ReductionError):
    pass


class MissingSampleError(LookupError):
    pass


@dataclass(frozen=True)
class MonodromyData:
    M: np.ndarray
    period: float
    multipliers: tuple
    lambda_plus: complex

    @property
    def trace(self) -> float:
        return float(np.trace(self.M))

    @classmethod
    def from_matrix(cls, M, period: float) -> "MonodromyData":
        """Multipliers and exponent of a one-period propagator (no classification check)."""
        M = np.array(M, dtype=float)
        tr = float(np.trace(M))
        det = float(np.linalg.det(M))
        disc = tr * tr - 4.0 * det
        if disc > 0:
            s = math.sqrt(disc)
            mu_p = 0.5 * (tr + s) if tr >= 0 else 0.5 * (tr - s)
            mu_m = det / mu_p
            lam = complex(math.log(abs(mu_p)), math.pi if mu_p < 0 else 0.0) / period
            mults = (complex(mu_p), complex(mu_m))
        else:
            s = math.sqrt(-disc)
            mu_p = complex(0.5 * tr, 0.5 * s)
            mu_m = complex(0.5 * tr, -0.5 * s)
            lam = cmath.log(mu_p) / period
            mults = (mu_p, mu_m)
        return cls(M, float(period), mults, complex(lam))


def classify_gap(m: MonodromyData, tol: float = TRACE_TOL) -> str:
    """``hyperbolic`` iff ``|tr M| > 2 + tol``, ``elliptic`` iff ``< 2 - tol``."""
    a = abs(m.trace)
    if a > 2.0 + tol:
        return "hyperbolic"
    if a < 2.0 - tol:
        return "elliptic"
    return "parabolic"


def monodromy(spec: DrivingSpec, theta, period: float,
              cfg: IntegratorConfig = DEFAULT_CONFIG) -> MonodromyData:
    """``M = F(period, 0; theta)`` with its multipliers; parabolic cases are refused."""
    if not spec.is_periodic_with(period):
        raise NotPeriodicError(f"driving is not periodic with period {period:g}")
    M = integrate_cocycle(spec, theta, 0.0, period, cfg).F
    m = MonodromyData.from_matrix(M, period)
    if classify_gap(m) == "parabolic":
        raise ParabolicError(f"|tr M| = {abs(m.trace):.12g} is 2 within {TRACE_TOL:g}")
    return m


@dataclass(frozen=True)
class ReductionFrame:
    times: np.ndarray
    g: np.ndarray
    period: float
    theta: np.ndarray
    omega: np.ndarray
    lambda_plus: complex
    periodicity_residual: float

    @property
    def samples(self):
        return list(zip(self.times, self.g))


def _eigvec(M: np.ndarray, mu: float) -> np.ndarray:
    a, b = M[0]
    c, d = M[1]
    cand = [np.array([b, mu - a]), np.array([mu - d, c])]
    v = max(cand, key=np.linalg.norm)
    v = v / np.linalg.norm(v)
    pivot = v[0] if abs(v[0]) > 1e-14 else v[1]
    return -v if pivot < 0 else v


def floquet_reduction(spec: DrivingSpec, theta, period: float, n_samples: int = 64,
                      cfg: IntegratorConfig = DEFAULT_CONFIG) -> ReductionFrame:
    m = monodromy(spec, theta, period, cfg)
    kind = classify_gap(m)
    if kind != "hyperbolic":
        raise ReductionError(f"reduction needs a hyperbolic monodromy, got {kind}")
    mu_p, mu_m = (z.real for z in m.multipliers)
    g0 = np.column_stack([_eigvec(m.M, mu_p), _eigvec(m.M, mu_m)])
    if ray_angle(g0[:, 0], g0[:, 1]) < 1e-6:
        raise ConditioningError("Floquet eigenvectors are nearly parallel")
    times, mats = block_propagators(spec, theta, 0.0, period, period / n_samples, cfg)
    F = np.empty((len(times), 2, 2))
    F[0] = np.eye(2)
    for j, B in enumerate(mats):
        F[j + 1] = B @ F[j]
    lam = m.lambda_plus
    scale = np.exp(-np.multiply.outer(times, np.array([lam, -lam])))
    g = (F @ g0)[:, :, :] * scale[:, None, :]
    if lam.imag == 0:
        g = g.real
    residual = float(np.max(np.abs(g[-1] - g[0])))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return ReductionFrame(times[:-1], g[:-1], period, theta, spec.omega, lam, residual)


@dataclass(frozen=True)
class DirectionField:
    """Sampled stable/unstable fields ``theta -> (a_-, a_+)`` on the hull.

    ``minus`` and ``plus`` hold stacked ``(a_p; a_x)`` rows. Lookups return
    the nearest sample and fail if it is farther than ``max_distance``.
    """

    points: np.ndarray
    minus: np.ndarray
    plus: np.ndarray
    max_distance: float

    def __len__(self):
        return self.points.shape[0]

    def index(self, theta) -> int:
        theta = wrap(np.atleast_1d(np.asarray(theta, dtype=float)))
        diff = np.abs(self.points - theta)
        diff = np.minimum(diff, 2 * np.pi - diff)
        dist = np.linalg.norm(diff, axis=1)
        i = int(np.argmin(dist))
        if dist[i] > self.max_distance:
            raise MissingSampleError(f"no sample within {self.max_distance:g} of {theta} (nearest {dist[i]:.3g})")
        return i

    def at(self, theta):
        i = self.index(theta)
        return self.minus[i], self.plus[i]

    def directions(self, i: int):
        return Direction.from_stacked(self.minus[i]), Direction.from_stacked(self.plus[i])

    def rotated(self, angle: float) -> "DirectionField":
        c, s = math.cos(angle), math.sin(angle)
        R = np.array([[c, -s], [s, c]])
        return DirectionField(self.points, self.minus @ R.T, self.plus @ R.T, self.max_distance)


def anosov_directions(frame: ReductionFrame) -> DirectionField:
    g = frame.g
    det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0]
    if np.any(np.abs(det) < 1e-10):
        raise ConditioningError("reduction frame is singular at a sample")
    minus = np.column_stack([g[:, 1, 1] / det, -g[:, 0, 1] / det])
    plus = np.column_stack([-g[:, 1, 0] / det, g[:, 0, 0] / det])
    points = np.array([flow(frame.theta, t, frame.omega) for t in frame.times])
    spacing = torus_distance(points[0], points[1]) if len(points) > 1 else np.pi
    return DirectionField(points, minus, plus, 0.5 * spacing + 1e-12)


def _segment_blocks(spec, theta, t0, times, cfg):
    """Block propagators from ``t0`` through every time in ``times`` (sorted, ``>= t0``).

    Returns ``(mats, ends)`` where ``ends[k]`` counts the blocks up to ``times[k]``.
    """
    pieces, ends, current, count = [], [], t0, 0
    for t in times:
        if t < current:
            raise ValueError("times must be sorted and not precede t0")
        if t > current:
            _, mats = block_propagators(spec, theta, current, t, cfg.renorm_interval, cfg)
            pieces.append(mats)
            count += mats.shape[0]
            current = t
        ends.append(count)
    mats = np.concatenate(pieces, axis=0) if pieces else np.empty((0, 2, 2))
    return mats, ends


def _log_apply(mats, v, transpose=False):
    """``(unit, log-norm)`` of ``mats`` applied to ``v``; in order, or as ``M_0^T ... M_last^T v``."""
    v = np.array(v, dtype=complex)
    nv = np.linalg.norm(v)
    v, acc = v / nv, math.log(nv)
    seq = (m.T for m in mats[::-1]) if transpose else _adjugate_transpose(mats)
    for M in seq:
        v = M @ v
        nv = np.linalg.norm(v)
        v, acc = v / nv, acc + math.log(nv)
    return v, acc


def _relation_residual(unit, log, lam_dt, target) -> float:
    """``|e^log unit - e^lam_dt target| / (max(1, |e^lam_dt|) |target|)`` without overflow."""
    z = complex(lam_dt)
    shift = max(0.0, z.real)
    r = np.linalg.norm(np.exp(log - shift) * unit - np.exp(z - shift) * target) / np.linalg.norm(target)
    if not np.isfinite(r):
        raise ReductionError("non-finite residual")
    return float(r)


def anosov_residuals(spec: DrivingSpec, theta, dirs: DirectionField, lambdas, t0: float, times,
                     cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Residual of the skew Anosov relation at each time ``t >= t0`` in ``times``.

    The unstable field is pushed forward, ``U a_+(t0) U^dag = e^{lam_+ (t-t0)} a_+(t)``.
    The stable field is checked in the equivalent inverse-time form
    ``U^dag a_-(t) U = e^{-lam_- (t-t0)} a_-(t0)``, which keeps rounding errors
    from being amplified by the expanding direction. Each side is divided by
    ``max(1, |exponential|)`` times the norm of its target; the larger of the
    two residuals is returned.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    order = np.argsort(times, kind="stable")
    mats, ends = _segment_blocks(spec, theta, t0, times[order], cfg)
    lam_m, lam_p = (complex(z) for z in lambdas)
    am0, ap0 = dirs.at(flow(theta, t0, spec.omega))
    out = np.empty(times.size)
    v, acc, done = np.array(ap0, dtype=complex), 0.0, 0
    nv = np.linalg.norm(v)
    v, acc = v / nv, math.log(nv)
    for k, idx in enumerate(order):
        t = times[idx]
        v, step_log = _log_apply(mats[done:ends[k]], v)
        acc += step_log
        done = ends[k]
        am, ap = dirs.at(flow(theta, t, spec.omega))
        plus = _relation_residual(v, acc, lam_p * (t - t0), ap)
        w, wlog = _log_apply(mats[:ends[k]], am, transpose=True)
        minus = _relation_residual(w, wlog, -lam_m * (t - t0), am0)
        out[idx] = max(plus, minus)
    return out


def anosov_residual(spec: DrivingSpec, theta, dirs: DirectionField, lambdas, t0: float, t: float,
                    cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    return float(anosov_residuals(spec, theta, dirs, lambdas, t0, [t], cfg)[0])


def pushforward_angle_residual(spec: DrivingSpec, theta, dirs: DirectionField, t0: float, t: float,
                               cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Scale-free check: angle between transported fields and the fields at the other end."""
    mats, _ = _segment_blocks(spec, theta, t0, [t], cfg)
    am0, ap0 = dirs.at(flow(theta, t0, spec.omega))
    am, ap = dirs.at(flow(theta, t, spec.omega))
    v, _ = _log_apply(mats, ap0)
    w, _ = _log_apply(mats, am, transpose=True)
    return max(ray_angle(v, ap), ray_angle(w, am0))


def transversality(dirs: DirectionField) -> np.ndarray:
    """``|sigma(a_-, a_+)|`` at every sample."""
    return np.array([abs(symplectic_form(*dirs.directions(i))) for i in range(len(dirs))])


@dataclass(frozen=True)
class QuasiPeriodicField:
    field: DirectionField
    lambdas: tuple
    lambda_c: float
    lambda_c_stderr: float
    caveat: str = ("exponents are real finite-time estimates; an imaginary part of lambda_+ "
                   "cannot be resolved, and continuity of the fields over the hull is not checked")


def orbit_grid(theta0, omega, times) -> np.ndarray:
    return np.array([flow(theta0, t, omega) for t in times])


def _bump_weights(n: int) -> np.ndarray:
    """Weights ``exp(-1/(x(1-x)))`` on ``n`` interior points of (0, 1), normalised to sum 1.

    Weighted orbit averages with this smooth window converge much faster than
    flat averages along quasi-periodic orbits.
    """
    x = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (x * (1.0 - x)))
    return w / w.sum()


def _scale(mats_pushed, r, lam, times, t0) -> float:
    _, logs = propagate_log(mats_pushed, r)
    s = np.abs(times[1:] - t0)
    defect = logs[:, 0] - lam * s
    return math.exp(-float(_bump_weights(defect.size) @ defect))


def quasiperiodic_direction_field(spec: DrivingSpec, theta_grid, horizon: float,
                                  cfg: IntegratorConfig = DEFAULT_CONFIG,
                                  doubling_tol: float = 1e-4, max_distance: float = 1e-6) -> QuasiPeriodicField:
    """Finite-time stable/unstable fields at each point of ``theta_grid``.

    The unstable ray at ``theta`` is the dominant direction of the push-forward
    from ``phi^-H theta``; the stable ray is that of the adjoint iteration from
    ``phi^H theta``. Rays are scaled by an orbit average of their growth
    defect so that the relation with real ``lam_+- = +-lambda_c`` is
    meaningful at finite horizon.
    """
    grid = np.atleast_2d(np.asarray(theta_grid, dtype=float))
    if spec.d < 2:
        raise ValueError("quasi-periodic fields need a hull of dimension >= 2")
    est = classical_lyapunov(spec, grid[0], horizon, cfg)
    if not est.value > 3.0 * est.slope_stderr:
        raise NonHyperbolicError(f"lambda_c = {est.value:.3g} not resolved above 3*stderr")
    lam = est.value
    minus, plus = [], []
    for theta in grid:
        t_f, fwd = block_propagators(spec, theta, 0.0, 2.0 * horizon, cfg.renorm_interval, cfg)
        t_b, bwd = block_propagators(spec, theta, 0.0, -2.0 * horizon, cfg.renorm_interval, cfg)
        half = int(np.searchsorted(t_f, horizon - 1e-9))
        rays = []
        for mats in (fwd, bwd):
            short, _ = _adjoint_backward(mats, half)
            long, _ = _adjoint_backward(mats, mats.shape[0])
            angle = ray_angle(short, long)
            if angle > doubling_tol:
                raise SplittingError(f"direction changed by {angle:.2e} under horizon doubling")
            rays.append(long)
        r_minus, r_plus = rays
        c_plus = _scale(_adjugate_transpose(fwd[:half]), r_plus, lam, t_f[:half + 1], 0.0)
        c_minus = _scale(_adjugate_transpose(bwd[:half]), r_minus, lam, t_b[:half + 1], 0.0)
        minus.append(c_minus * r_minus)
        plus.append(c_plus * r_plus)
    fld = DirectionField(wrap(grid), np.array(minus), np.array(plus), max_distance)
    return QuasiPeriodicField(fld, (-lam, lam), lam, est.slope_stderr)


@dataclass
class AnosovCertificate:
    directions: DirectionField
    exponents: tuple
    residuals: np.ndarray
    tolerance: float
    classification: str
    notes: list = field(default_factory=list)

    @property
    def residual_max(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    @property
    def verdict(self) -> str:
        ok = np.all(np.isfinite(self.residuals)) and self.residual_max <= self.tolerance
        return "pass" if ok else "fail"

    def to_dict(self) -> dict:
        lam = complex(self.exponents[1])
        return {
            "lambda_plus": {"re": lam.real, "im": lam.imag},
            "classification": self.classification,
            "residual_max": self.residual_max,
            "grid": self.directions.points.tolist(),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def certify_periodic(spec: DrivingSpec, theta, period: float, n_samples: int = 64, periods: int = 5,
                     cfg: IntegratorConfig = DEFAULT_CONFIG, tol: float = 1e-6,
                     starts: int = 4, lags_per_period: int = 4) -> AnosovCertificate:
    """Floquet fields checked against the skew relation over ``periods`` periods."""
    frame = floquet_reduction(spec, theta, period, n_samples, cfg)
    dirs = anosov_directions(frame)
    lam = frame.lambda_plus
    dt = period / n_samples
    res = []
    for j in np.linspace(0, n_samples, starts, endpoint=False).astype(int):
        t0 = j * dt
        lag = max(1, n_samples // lags_per_period)
        ts = t0 + dt * lag * np.arange(1, periods * lags_per_period + 1)
        res.extend(anosov_residuals(spec, theta, dirs, (-lam, lam), t0, ts, cfg))
    notes = [f"periodicity residual of g: {frame.periodicity_residual:.3e}"]
    return AnosovCertificate(dirs, (-lam, lam), np.array(res), tol, "hyperbolic", notes)


def certify_quasiperiodic(spec: DrivingSpec, theta0, horizon: float, n_points: int = 24,
                          spacing: float = 0.5, max_lag: float = 5.0,
                          cfg: IntegratorConfig = DEFAULT_CONFIG, tol: float = 1e-2) -> AnosovCertificate:
    """Fields estimated along one orbit, checked between orbit samples up to ``max_lag`` apart."""
    times = spacing * np.arange(n_points)
    qp = quasiperiodic_direction_field(spec, orbit_grid(theta0, spec.omega, times), horizon, cfg)
    res = []
    max_steps = int(round(max_lag / spacing))
    for j in range(0, n_points - 1, max(1, max_steps // 2)):
        later = times[j + 1:min(n_points, j + max_steps + 1)]
        res.extend(anosov_residuals(spec, theta0, qp.field, qp.lambdas, times[j], later, cfg))
    return AnosovCertificate(qp.field, qp.lambdas, np.array(res), tol, "hyperbolic", [qp.caveat])
