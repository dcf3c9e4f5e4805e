"""Torus hulls, linear flows and trigonometric driving potentials."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap(theta):
    """Map angles into ``[0, 2pi)``."""
    return np.mod(theta, TWO_PI)


def torus_distance(a, b) -> float:
    """Euclidean distance on ``T^d`` with the flat metric."""
    d = np.abs(wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    d = np.minimum(d, TWO_PI - d)
    return float(np.linalg.norm(d))


def flow(theta, t, omega) -> np.ndarray:
    """Hull translation ``theta + omega t`` (mod 2pi)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if theta.shape != omega.shape:
        raise ValueError(f"hull point has dimension {theta.shape[0]} but omega has {omega.shape[0]}")
    return wrap(theta + omega * t)


@dataclass(frozen=True)
class TrigTerm:
    k: tuple
    a: float = 0.0
    b: float = 0.0


@dataclass(frozen=True)
class TrigPolynomial:
    """``constant + sum_k a_k cos(k.theta) + b_k sin(k.theta)``."""

    constant: float = 0.0
    terms: tuple = ()
    dimension: int | None = None

    def __post_init__(self):
        terms = tuple(t if isinstance(t, TrigTerm) else TrigTerm(tuple(t[0]), *t[1:]) for t in self.terms)
        terms = tuple(TrigTerm(tuple(int(k) for k in t.k), float(t.a), float(t.b)) for t in terms)
        dims = {len(t.k) for t in terms}
        if self.dimension is not None:
            dims.add(self.dimension)
        if len(dims) > 1:
            raise ValueError(f"inconsistent multi-index dimensions {sorted(dims)}")
        if len({t.k for t in terms}) != len(terms):
            raise ValueError("multi-indices must be distinct")
        vals = [self.constant] + [t.a for t in terms] + [t.b for t in terms]
        if not np.all(np.isfinite(vals)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "constant", float(self.constant))
        if self.dimension is None and terms:
            object.__setattr__(self, "dimension", len(terms[0].k))

    @classmethod
    def cosine(cls, amplitude: float, d: int = 1, axis: int = 0) -> "TrigPolynomial":
        k = [0] * d
        k[axis] = 1
        return cls(0.0, (TrigTerm(tuple(k), amplitude, 0.0),), d)

    @property
    def _k(self) -> np.ndarray:
        return np.array([t.k for t in self.terms], dtype=float).reshape(len(self.terms), -1)

    def active_terms(self):
        """Terms with a nonzero wave vector and nonzero amplitude."""
        return [t for t in self.terms if any(t.k) and (t.a != 0.0 or t.b != 0.0)]

    def mean(self) -> float:
        return self.constant + sum(t.a for t in self.terms if not any(t.k))

    def is_constant(self) -> bool:
        return not self.active_terms()

    def sup_bound(self) -> float:
        return abs(self.constant) + sum(abs(t.a) + abs(t.b) for t in self.terms)

    def __call__(self, theta) -> np.ndarray:
        """Evaluate at one hull point (shape ``(d,)``) or a batch (shape ``(..., d)``)."""
        theta = np.asarray(theta, dtype=float)
        if not self.terms:
            return np.full(theta.shape[:-1] if theta.ndim > 1 else (), self.constant)[()]
        if theta.ndim == 0:
            theta = theta[None]
        if theta.shape[-1] != self.dimension:
            raise ValueError(f"hull point has dimension {theta.shape[-1]}, potential expects {self.dimension}")
        phase = theta @ self._k.T
        a = np.array([t.a for t in self.terms])
        b = np.array([t.b for t in self.terms])
        return (self.constant + np.cos(phase) @ a + np.sin(phase) @ b)[()]


def evaluate_potential(V: TrigPolynomial, theta) -> float:
    return V(theta)


@dataclass(frozen=True)
class DrivingSpec:
    """Effective stiffness ``f(phi^t theta) = E - V(theta + omega t)``."""

    V: TrigPolynomial
    E: float
    omega: np.ndarray = field(default_factory=lambda: np.array([1.0]))

    def __post_init__(self):
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float)).copy()
        if omega.ndim != 1 or omega.size < 1 or not np.all(np.isfinite(omega)):
            raise ValueError("omega must be a finite vector of length >= 1")
        if self.V.dimension is not None and self.V.dimension != omega.size:
            raise ValueError(f"potential dimension {self.V.dimension} does not match omega length {omega.size}")
        if not np.isfinite(self.E):
            raise ValueError("E must be finite")
        if not self.V.is_constant() and not np.any(omega):
            raise ValueError("omega must have a nonzero entry for a non-constant driving")
        omega.flags.writeable = False
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "E", float(self.E))

    @property
    def d(self) -> int:
        return self.omega.size

    def with_E(self, E: float) -> "DrivingSpec":
        return DrivingSpec(self.V, E, self.omega)

    def is_constant(self) -> bool:
        return self.V.is_constant()

    def constant_f(self) -> float:
        return self.E - self.V.mean()

    def f_bound(self) -> float:
        return abs(self.E) + self.V.sup_bound()

    def f_along(self, theta, times) -> np.ndarray:
        """Stiffness along the orbit of ``theta`` at an array of times."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        times = np.asarray(times, dtype=float)
        if self.is_constant():
            return np.full(times.shape, self.constant_f())
        pts = theta + times[..., None] * self.omega
        return self.E - self.V(pts)

    def frequencies(self) -> np.ndarray:
        """Angular frequencies ``k . omega`` of the active terms."""
        return np.array([np.dot(t.k, self.omega) for t in self.V.active_terms()])

    def is_periodic_with(self, period: float, tol: float = 1e-9) -> bool:
        if self.is_constant():
            return True
        cycles = self.frequencies() * period / (2.0 * np.pi)
        return bool(np.all(np.abs(cycles - np.round(cycles)) <= tol * np.maximum(1.0, np.abs(cycles))))

    def period(self, max_denominator: int = 64) -> float | None:
        """Smallest common period of the driving, or ``None`` if quasi-periodic.

        Constant drivings have no intrinsic period and also return ``None``.
        """
        if self.is_constant():
            return None
        freqs = np.abs(self.frequencies())
        freqs = freqs[freqs > 0]
        base = freqs[0]
        ratios = [Fraction(float(f / base)).limit_denominator(max_denominator) for f in freqs]
        if any(abs(float(r) - f / base) > 1e-12 * max(1.0, f / base) for r, f in zip(ratios, freqs)):
            return None
        # all frequencies are integer multiples of base / lcm(denominators)
        lcm = 1
        for r in ratios:
            lcm = lcm * r.denominator // np.gcd(lcm, r.denominator)
        numerators = [int(r * lcm) for r in ratios]
        g = 0
        for m in numerators:
            g = int(np.gcd(g, m))
        fundamental = base * g / lcm
        return 2.0 * np.pi / fundamental


def evaluate_f(spec: DrivingSpec, theta) -> float:
    return spec.E - spec.V(theta)
