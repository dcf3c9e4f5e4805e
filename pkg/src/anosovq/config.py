"""JSON run configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .cocycle import IntegratorConfig
from .hull import DrivingSpec, TrigPolynomial, TrigTerm
from .lyapunov import DEFAULT_BETA
from .weyl import Direction

KNOWN_KEYS = {
    "dimension", "omega", "E", "potential", "E_grid", "horizon", "t0", "theta", "integrator",
    "count", "beta", "n_samples", "periods", "period", "T", "tolerance", "n_random", "seed", "orbit",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    V: TrigPolynomial
    omega: np.ndarray
    E: float | None = None
    E_grid: tuple | None = None
    horizon: float = 100.0
    t0: float = 0.0
    theta: np.ndarray | None = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    count: int = 16
    beta: Direction = DEFAULT_BETA
    n_samples: int = 64
    periods: int = 5
    period: float | None = None
    T: float = 1.0
    tolerance: float | None = None
    n_random: int = 4
    seed: int = 0
    orbit_points: int = 24
    orbit_spacing: float = 0.5

    @property
    def d(self) -> int:
        return self.omega.size

    @property
    def hull_point(self) -> np.ndarray:
        return np.zeros(self.d) if self.theta is None else self.theta

    def spec(self, E: float | None = None) -> DrivingSpec:
        E = self.E if E is None else E
        if E is None:
            raise ConfigError("config needs 'E' for this mode")
        return DrivingSpec(self.V, E, self.omega)

    def energies(self) -> np.ndarray:
        if self.E_grid is None:
            raise ConfigError("scan mode needs 'E_grid'")
        lo, hi, n = self.E_grid
        return np.linspace(lo, hi, n)

    def driving_period(self) -> float | None:
        if self.period is not None:
            return self.period
        template = DrivingSpec(self.V, 0.0, self.omega)
        if template.is_constant():
            return 2.0 * np.pi
        return template.period()


def _number(value, name, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{name}' must be a number")
    if integer and int(value) != value:
        raise ConfigError(f"'{name}' must be an integer")
    if not np.isfinite(value):
        raise ConfigError(f"'{name}' must be finite")
    if positive and value <= 0:
        raise ConfigError(f"'{name}' must be positive")
    return int(value) if integer else float(value)


def _vector(value, name, n=None):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"'{name}' must be a non-empty list of numbers")
    out = np.array([_number(v, name) for v in value])
    if n is not None and out.size != n:
        raise ConfigError(f"'{name}' must have length {n}")
    return out


def _potential(raw, d):
    if raw is None:
        return TrigPolynomial(0.0, (), d)
    if not isinstance(raw, dict) or set(raw) - {"constant", "terms"}:
        raise ConfigError("'potential' must be an object with 'constant' and 'terms'")
    terms = []
    for t in raw.get("terms", []):
        if not isinstance(t, dict) or "k" not in t or set(t) - {"k", "a", "b"}:
            raise ConfigError("potential terms need 'k' and optional 'a', 'b'")
        k = tuple(_number(x, "k", integer=True) for x in _vector(t["k"], "k", d))
        terms.append(TrigTerm(k, _number(t.get("a", 0.0), "a"), _number(t.get("b", 0.0), "b")))
    return TrigPolynomial(_number(raw.get("constant", 0.0), "constant"), tuple(terms), d)


def parse_config(raw: dict, seed: int | None = None) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        d = _number(raw.get("dimension", 1), "dimension", positive=True, integer=True)
        omega = _vector(raw.get("omega", [1.0] * d), "omega", d)
        kw = {"V": _potential(raw.get("potential"), d), "omega": omega}
        if "E" in raw:
            kw["E"] = _number(raw["E"], "E")
        if "E_grid" in raw:
            g = raw["E_grid"]
            if not isinstance(g, dict) or set(g) != {"min", "max", "count"}:
                raise ConfigError("'E_grid' needs exactly 'min', 'max', 'count'")
            lo, hi = _number(g["min"], "E_grid.min"), _number(g["max"], "E_grid.max")
            n = _number(g["count"], "E_grid.count", positive=True, integer=True)
            if lo > hi:
                raise ConfigError("'E_grid' needs min <= max")
            kw["E_grid"] = (lo, hi, n)
        if "horizon" in raw:
            kw["horizon"] = _number(raw["horizon"], "horizon", positive=True)
        if "t0" in raw:
            kw["t0"] = _number(raw["t0"], "t0")
        if "theta" in raw:
            kw["theta"] = _vector(raw["theta"], "theta", d)
        if "integrator" in raw:
            ic = raw["integrator"]
            if not isinstance(ic, dict):
                raise ConfigError("'integrator' must be an object")
            kw["integrator"] = IntegratorConfig(**ic)
        for key in ("count", "n_samples", "periods"):
            if key in raw:
                kw[key] = _number(raw[key], key, positive=True, integer=True)
        if kw.get("count", 16) < 4:
            raise ConfigError("'count' must be >= 4")
        if "n_random" in raw:
            kw["n_random"] = _number(raw["n_random"], "n_random", integer=True)
            if kw["n_random"] < 0:
                raise ConfigError("'n_random' must be >= 0")
        if "beta" in raw:
            b = raw["beta"]
            if not isinstance(b, dict) or set(b) != {"alpha_x", "alpha_p"}:
                raise ConfigError("'beta' needs 'alpha_x' and 'alpha_p'")
            kw["beta"] = Direction(_vector(b["alpha_x"], "beta.alpha_x", 1), _vector(b["alpha_p"], "beta.alpha_p", 1))
        for key in ("period", "tolerance"):
            if raw.get(key) is not None:
                kw[key] = _number(raw[key], key, positive=True)
        if "T" in raw:
            kw["T"] = _number(raw["T"], "T")
            if kw["T"] < 0:
                raise ConfigError("'T' must be >= 0")
        if "seed" in raw:
            kw["seed"] = _number(raw["seed"], "seed", integer=True)
        if "orbit" in raw:
            o = raw["orbit"]
            if not isinstance(o, dict) or set(o) - {"n_points", "spacing"}:
                raise ConfigError("'orbit' accepts 'n_points' and 'spacing'")
            if "n_points" in o:
                kw["orbit_points"] = _number(o["n_points"], "orbit.n_points", positive=True, integer=True)
            if "spacing" in o:
                kw["orbit_spacing"] = _number(o["spacing"], "orbit.spacing", positive=True)
        if seed is not None:
            kw["seed"] = seed
        cfg = RunConfig(**kw)
        DrivingSpec(cfg.V, 0.0 if cfg.E is None else cfg.E, cfg.omega)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path, seed: int | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    return parse_config(raw, seed)
