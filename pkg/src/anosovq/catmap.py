"""Configurational quantum cat system: exact one-period action on linear observables.

One period is a free evolution ``exp(-i T p^2 / 2)`` followed by the
configuration change ``x -> C^-1 x``, ``p -> C p`` with ``C = [[2, 1], [1, 1]]``.
Conjugation ``A -> U A U^dag`` then sends ``x -> C^-1 (x - T p)`` and
``p -> C p``; on coefficients ``(a_x; a_p)`` this is the 4x4 matrix
``[[C^-1, 0], [-T C^-1, C]]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .weyl import Direction, symplectic_deviation

CAT = np.array([[2.0, 1.0], [1.0, 1.0]])
CAT_INV = np.array([[1.0, -1.0], [-1.0, 2.0]])
Q_MAX = 10**6
RATIONAL_TOL = 1e-9
EIGEN_TOL = 1e-10


@dataclass(frozen=True)
class CatSystem:
    T: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T >= 0):
            raise ValueError("kick period T must be finite and non-negative")

    @property
    def C(self) -> np.ndarray:
        return CAT.copy()

    @property
    def lam(self) -> float:
        return math.log((3.0 + math.sqrt(5.0)) / 2.0)


@dataclass(frozen=True)
class CoefficientMap:
    """Action on stacked ``(a_x; a_p)`` coefficients, plus the matching phase-space map on ``(p; x)``."""

    M_F: np.ndarray
    phase: np.ndarray

    def apply(self, a: Direction) -> Direction:
        v = self.M_F @ np.concatenate([a.alpha_x, a.alpha_p])
        return Direction(v[:2], v[2:])

    def phase_deviation(self) -> float:
        return symplectic_deviation(self.phase)


def build_cat_coefficient_map(sys: CatSystem, sign: int = -1) -> CoefficientMap:
    """``sign=-1`` is the conjugation derived from ``[x, p^2] = 2ip``; ``+1`` is the flipped variant."""
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    z = np.zeros((2, 2))
    K = sign * sys.T * CAT_INV
    M = np.block([[CAT_INV, z], [K, CAT]])
    P = np.block([[CAT, z], [K, CAT_INV]])
    return CoefficientMap(M, P)


def cat_eigenvectors():
    """``(v_-, v_+)`` with ``C v = mu v``, ``v ∝ (1, mu - 2)``, unit length, first component positive."""
    r5 = math.sqrt(5.0)
    out = []
    for mu in ((3.0 - r5) / 2.0, (3.0 + r5) / 2.0):
        v = np.array([1.0, mu - 2.0])
        out.append(v / np.linalg.norm(v))
    return tuple(out)


@dataclass(frozen=True)
class CatDirection:
    label: str
    direction: Direction
    exponent: float


def cat_anosov_directions(sys: CatSystem):
    """Two stable (``-lam``) and two unstable (``+lam``) coefficient eigenvectors."""
    vm, vp = cat_eigenvectors()
    lam = sys.lam
    D = CAT @ CAT - np.eye(2)
    zero = np.zeros(2)
    return (
        CatDirection("alpha_1", Direction(zero, vm), -lam),
        CatDirection("alpha_2", Direction(D @ vp, sys.T * vp), -lam),
        CatDirection("alpha_3", Direction(zero, vp), lam),
        CatDirection("alpha_4", Direction(D @ vm, sys.T * vm), lam),
    )


def _convergents(x: float, limit: int):
    """Continued-fraction convergents ``(p, q)`` of ``x >= 0`` with ``q <= limit``."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    rest = x
    while True:
        a = math.floor(rest)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > limit:
            return
        yield p1, q1
        frac = rest - a
        if frac <= 0.0:
            return
        rest = 1.0 / frac
        if not math.isfinite(rest):
            return


def classify_inner(a: Direction, tol: float = RATIONAL_TOL, q_max: int = Q_MAX) -> str:
    """Whether ``delta_a`` is inner: some ``c != 0`` puts ``c a_x`` on ``2 pi Z^2``.

    The ratio ``r`` of the smaller to the larger component of ``a_x`` is tested
    for a lattice hit ``|q r - p| <= tol``. Hits with ``q <= q_max`` mean inner.
    Hits only at larger ``q``, up to where floating-point resolution of ``r``
    runs out, are undecidable; no hit means outer.
    """
    if a.n != 2:
        raise ValueError("inner/outer classification is defined for n = 2")
    ax = np.abs(np.asarray(a.alpha_x))
    big = ax.max()
    if big == 0.0:
        return "inner"
    r = float(ax.min() / big)
    horizon = max(q_max, int(tol / (np.finfo(float).eps * max(1.0, r))))
    for p, q in _convergents(r, horizon):
        if abs(q * r - p) <= tol:
            return "inner" if q <= q_max else "undecidable"
    return "outer"


def eigen_residual(m: CoefficientMap, d: CatDirection, k: int = 1) -> float:
    """``|M_F^k a - e^{k lam_i} a| / |a|``."""
    v = np.concatenate([d.direction.alpha_x, d.direction.alpha_p])
    w = np.linalg.matrix_power(m.M_F, k) @ v
    return float(np.linalg.norm(w - math.exp(k * d.exponent) * v) / np.linalg.norm(v))


@dataclass(frozen=True)
class CatReport:
    lam: float
    directions: tuple
    residuals: tuple
    derivations: tuple
    tolerance: float = EIGEN_TOL

    @property
    def lambda_bar(self) -> float:
        return max(abs(d.exponent) for d in self.directions)

    @property
    def verdict(self) -> str:
        return "pass" if all(r <= self.tolerance for r in self.residuals) else "fail"

    def to_dict(self) -> dict:
        rows = []
        for d, r, kind in zip(self.directions, self.residuals, self.derivations):
            rows.append({
                "label": d.label,
                "alpha_x": d.direction.alpha_x.tolist(),
                "alpha_p": d.direction.alpha_p.tolist(),
                "exponent": {"re": d.exponent, "im": 0.0},
                "residual": r,
                "derivation": kind,
            })
        return {"lambda": self.lam, "lambda_bar": self.lambda_bar, "directions": rows,
                "tolerance": self.tolerance, "verdict": self.verdict}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def verify_cat_anosov(m: CoefficientMap, dirs, lam: float | None = None) -> CatReport:
    if lam is None:
        lam = max(abs(d.exponent) for d in dirs)
    residuals = tuple(eigen_residual(m, d) for d in dirs)
    kinds = tuple(classify_inner(d.direction) for d in dirs)
    return CatReport(lam, tuple(dirs), residuals, kinds)


def run_cat(T: float = 1.0) -> CatReport:
    sys = CatSystem(T)
    return verify_cat_anosov(build_cat_coefficient_map(sys), cat_anosov_directions(sys), sys.lam)


def rational_ratio(a: Direction, q_max: int = Q_MAX):
    """Best rational approximation of the component ratio of ``a_x`` (diagnostic)."""
    ax = np.abs(np.asarray(a.alpha_x))
    if ax.max() == 0:
        return Fraction(0)
    return Fraction(float(ax.min() / ax.max())).limit_denominator(q_max)
