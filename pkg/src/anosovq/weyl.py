"""Linear observables, Weyl labels and their Heisenberg transport.

A linear observable ``L_a = a_x . x + a_p . p`` is stored as a :class:`Direction`
holding the two coefficient blocks separately. Matrices (classical propagators)
always act on phase vectors stacked as ``(p; x)``; the conversion to that
ordering is :meth:`Direction.stacked`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_SYMP = 1e-8


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Direction:
    """Coefficient vector of ``L_a``; also used as a Weyl label ``W(beta)``.

    Entries may be complex when the direction comes from a complex reduction
    frame (negative Floquet multipliers).
    """

    alpha_x: np.ndarray
    alpha_p: np.ndarray

    def __post_init__(self):
        ax = np.atleast_1d(np.asarray(self.alpha_x))
        ap = np.atleast_1d(np.asarray(self.alpha_p))
        if ax.ndim != 1 or ap.ndim != 1 or ax.shape != ap.shape:
            raise DimensionError(
                f"alpha_x and alpha_p must be vectors of equal length, got {ax.shape} and {ap.shape}"
            )
        if not (np.all(np.isfinite(ax)) and np.all(np.isfinite(ap))):
            raise ValueError("direction entries must be finite")
        dtype = np.result_type(ax, ap, float)
        ax = ax.astype(dtype, copy=True)
        ap = ap.astype(dtype, copy=True)
        ax.flags.writeable = False
        ap.flags.writeable = False
        object.__setattr__(self, "alpha_x", ax)
        object.__setattr__(self, "alpha_p", ap)

    @property
    def n(self) -> int:
        return self.alpha_x.shape[0]

    def stacked(self) -> np.ndarray:
        """Coefficients in propagator ordering ``(a_p; a_x)``."""
        return np.concatenate([self.alpha_p, self.alpha_x])

    @classmethod
    def from_stacked(cls, v) -> "Direction":
        v = np.asarray(v)
        if v.ndim != 1 or v.shape[0] % 2:
            raise DimensionError(f"stacked vector must have even length, got shape {v.shape}")
        n = v.shape[0] // 2
        return cls(alpha_x=v[n:], alpha_p=v[:n])

    @classmethod
    def of(cls, alpha_x, alpha_p) -> "Direction":
        return cls(np.atleast_1d(np.asarray(alpha_x, dtype=float)),
                   np.atleast_1d(np.asarray(alpha_p, dtype=float)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.stacked()))

    def normalized(self) -> "Direction":
        return Direction.from_stacked(self.stacked() / self.norm())

    def scaled(self, c) -> "Direction":
        return Direction(c * self.alpha_x, c * self.alpha_p)


# The label of W(beta) has the same layout as a direction.
WeylLabel = Direction


def _check_same_n(a: Direction, b: Direction):
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: n={a.n} vs n={b.n}")


def symplectic_form(a: Direction, b: Direction):
    """``sigma(a, b) = a_x . b_p - a_p . b_x``."""
    _check_same_n(a, b)
    return a.alpha_x @ b.alpha_p - a.alpha_p @ b.alpha_x


def commutator_norm(a: Direction, beta: WeylLabel) -> float:
    """Norm of ``[L_a, W(beta)]``.

    The commutator equals ``-sigma(a, beta) W(beta)`` and ``||W(beta)|| = 1``.
    """
    return abs(symplectic_form(a, beta))


def symplectic_unit(n: int) -> np.ndarray:
    """``J = [[0, -I], [I, 0]]`` in ``(p; x)`` ordering."""
    z = np.zeros((n, n))
    eye = np.eye(n)
    return np.block([[z, -eye], [eye, z]])


def _check_matrix(F, a: Direction) -> np.ndarray:
    F = np.asarray(F)
    if F.shape != (2 * a.n, 2 * a.n):
        raise DimensionError(f"matrix of shape {F.shape} cannot act on a direction with n={a.n}")
    return F


def apply_pullback(F, a: Direction) -> Direction:
    """Coefficients of ``U^dag L_a U`` when ``U^dag (p; x) U = F (p; x)``."""
    F = _check_matrix(F, a)
    return Direction.from_stacked(F.T @ a.stacked())


def apply_pushforward(F, a: Direction) -> Direction:
    """Coefficients of ``U L_a U^dag``; inverse of :func:`apply_pullback`."""
    F = _check_matrix(F, a)
    return Direction.from_stacked(np.linalg.solve(F.T, a.stacked()))


def symplectic_deviation(F) -> float:
    """Entrywise max norm of ``F^T J F - J``."""
    F = np.asarray(F)
    if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape[0] % 2:
        raise DimensionError(f"expected a square matrix of even size, got {F.shape}")
    J = symplectic_unit(F.shape[0] // 2)
    return float(np.max(np.abs(F.T @ J @ F - J)))


def ray_angle(u, v) -> float:
    """Angle in ``[0, pi/2]`` between the lines spanned by ``u`` and ``v``.

    Works for complex vectors (the phase of ``v`` relative to ``u`` is removed).
    """
    if isinstance(u, Direction):
        u = u.stacked()
    if isinstance(v, Direction):
        v = v.stacked()
    u = np.asarray(u) / np.linalg.norm(u)
    v = np.asarray(v) / np.linalg.norm(v)
    overlap = np.vdot(u, v)
    if abs(overlap) > 0:
        v = v * (abs(overlap) / overlap)
    return float(2.0 * np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v)))
