"""Quantum Lyapunov exponents and skew-product Anosov checks for driven linear oscillators."""

from .catmap import CatSystem, build_cat_coefficient_map, cat_anosov_directions, classify_inner, verify_cat_anosov
from .cocycle import IntegratorConfig, integrate_cocycle, compose, skew_shift_residual
from .dichotomy import (
    AnosovCertificate,
    MonodromyData,
    anosov_directions,
    anosov_residual,
    classify_gap,
    floquet_reduction,
    monodromy,
    quasiperiodic_direction_field,
)
from .hull import DrivingSpec, TrigPolynomial, TrigTerm, evaluate_f, evaluate_potential, flow
from .lyapunov import (
    classical_lyapunov,
    direction_profile,
    quantum_lyapunov_along,
    stable_direction,
    stable_exponent,
    upper_lyapunov,
)
from .weyl import Direction, apply_pullback, apply_pushforward, commutator_norm, symplectic_deviation, symplectic_form

__all__ = [name for name in dir() if not name.startswith("_")]
