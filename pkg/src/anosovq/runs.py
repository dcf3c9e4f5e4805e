"""Run modes behind the command line: exponent reports, E-sweeps, certificates."""

from __future__ import annotations

import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catmap import run_cat
from .cocycle import IntegrationError, integrate_cocycle
from .config import RunConfig
from .dichotomy import (
    MonodromyData,
    ReductionError,
    certify_periodic,
    certify_quasiperiodic,
    classify_gap,
)
from .lyapunov import EstimationError, NonHyperbolicError, classical_lyapunov, direction_profile, quantum_lyapunov_along
from .weyl import Direction

log = logging.getLogger(__name__)

CSV_HEADER = "E,lambda_c,lambda_bar,classification,residual"


class PreconditionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScanRow:
    E: float
    lambda_c: float | None
    lambda_bar: float | None
    classification: str
    residual: float | None = None
    stderr: float | None = None

    def csv(self) -> str:
        cells = [self.E, self.lambda_c, self.lambda_bar, self.classification, self.residual]
        return ",".join(c if isinstance(c, str) else ("" if c is None else format(c, ".12g")) for c in cells)


def classify_spec(cfg: RunConfig, E: float):
    """``(classification, monodromy or None)``; periodic by trace, constant by sign of f, else None."""
    spec = cfg.spec(E)
    if spec.is_constant():
        f = spec.constant_f()
        return ("hyperbolic" if f < 0 else "elliptic" if f > 0 else "parabolic"), None
    period = cfg.driving_period()
    if period is None:
        return None, None
    M = integrate_cocycle(spec, cfg.hull_point, 0.0, period, cfg.integrator).F
    m = MonodromyData.from_matrix(M, period)
    return classify_gap(m), m


def scan_row(cfg: RunConfig, E: float) -> ScanRow:
    spec = cfg.spec(E)
    theta = cfg.hull_point
    try:
        est = classical_lyapunov(spec, theta, cfg.horizon, cfg.integrator, t0=cfg.t0)
        profile = direction_profile(spec, theta, cfg.t0, cfg.count, cfg.horizon, cfg.integrator, cfg.beta)
        kind, _ = classify_spec(cfg, E)
        if kind is None:
            kind = "hyperbolic" if est.value > 3.0 * est.slope_stderr else "elliptic"
        residual = None
        if kind == "hyperbolic" and cfg.driving_period() is not None:
            cert = certify_periodic(spec, theta, cfg.driving_period(), cfg.n_samples, cfg.periods, cfg.integrator)
            residual = cert.residual_max
    except (EstimationError, IntegrationError, ReductionError, FloatingPointError) as exc:
        log.warning("E=%.12g unresolved: %s", E, exc)
        return ScanRow(E, None, None, "unresolved")
    return ScanRow(E, est.value, float(profile.values.max()), kind, residual, est.slope_stderr)


def run_scan(cfg: RunConfig, threads: int = 1) -> list:
    energies = [float(E) for E in cfg.energies()]
    if threads <= 1:
        return [scan_row(cfg, E) for E in energies]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda E: scan_row(cfg, E), energies))


def scan_csv(rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        buf.write(r.csv() + "\n")
    return buf.getvalue()


def _direction_json(a: Direction) -> dict:
    return {"alpha_x": np.real(a.alpha_x).tolist(), "alpha_p": np.real(a.alpha_p).tolist()}


def run_lyapunov(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    theta = cfg.hull_point
    est = classical_lyapunov(spec, theta, cfg.horizon, cfg.integrator, t0=cfg.t0)
    profile = direction_profile(spec, theta, cfg.t0, cfg.count, cfg.horizon, cfg.integrator, cfg.beta)
    rows = []
    for i, (a, e) in enumerate(zip(profile.directions, profile.exponents)):
        if i != profile.stable_index:
            rows.append({**_direction_json(a), "exponent": e.value, "stderr": e.slope_stderr})
    stable = None
    if profile.stable_index is not None:
        a = profile.directions[profile.stable_index]
        e = profile.exponents[profile.stable_index]
        stable = {**_direction_json(a), "exponent": e.value, "stderr": e.slope_stderr}
    rng = np.random.default_rng(cfg.seed)
    random_rows = []
    for _ in range(cfg.n_random):
        v = rng.standard_normal(2)
        a = Direction.from_stacked(v / np.linalg.norm(v))
        e = quantum_lyapunov_along(spec, theta, a, cfg.beta, cfg.t0, cfg.horizon, cfg.integrator)
        random_rows.append({**_direction_json(a), "exponent": e.value, "stderr": e.slope_stderr})
    return {
        "E": spec.E,
        "horizon": cfg.horizon,
        "lambda_c": {"value": est.value, "stderr": est.slope_stderr},
        "profile": rows,
        "lambda_bar": float(profile.values.max()),
        "stable": stable,
        "note": profile.note,
        "random_directions": random_rows,
        "seed": cfg.seed,
    }


def run_anosov(cfg: RunConfig):
    """Certificate for a hyperbolic spec; raises :class:`PreconditionError` otherwise."""
    spec = cfg.spec()
    theta = cfg.hull_point
    period = cfg.driving_period()
    if period is not None:
        kind, _ = classify_spec(cfg, spec.E)
        if kind != "hyperbolic":
            raise PreconditionError(f"E={spec.E:g} is {kind}: no exponential dichotomy to certify")
        tol = cfg.tolerance or 1e-6
        return certify_periodic(spec, theta, period, cfg.n_samples, cfg.periods, cfg.integrator, tol)
    tol = cfg.tolerance or 1e-2
    try:
        return certify_quasiperiodic(spec, theta, cfg.horizon, cfg.orbit_points, cfg.orbit_spacing,
                                     cfg=cfg.integrator, tol=tol)
    except NonHyperbolicError as exc:
        raise PreconditionError(f"E={spec.E:g} is not numerically hyperbolic: {exc}") from exc


def run_catmap(cfg: RunConfig):
    return run_cat(cfg.T)


def dumps(obj) -> str:
    def fix(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, dict):
            return {k: fix(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [fix(v) for v in x]
        return x
    return json.dumps(fix(obj), indent=2, sort_keys=True) + "\n"
