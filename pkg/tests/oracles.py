"""Independent reference computations used only by the tests."""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import brentq


def expm_propagator(f, t):
    """Matrix exponential of the constant generator [[0, -f], [1, 0]] on (p; x)."""
    return expm(np.array([[0.0, -f], [1.0, 0.0]]) * t)


def dop853_propagator(spec, theta, t0, t1, rtol=1e-13, atol=1e-14):
    """Propagator by adaptive high-order integration of the 2x2 matrix ODE."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))

    def rhs(t, y):
        f = spec.E - spec.V(theta + spec.omega * t)
        Y = y.reshape(2, 2)
        return np.array([[0.0, -f], [1.0, 0.0]]) @ Y

    def flat(t, y):
        return rhs(t, y).ravel()

    sol = solve_ivp(flat, (t0, t1), np.eye(2).ravel(), method="DOP853", rtol=rtol, atol=atol)
    return sol.y[:, -1].reshape(2, 2)


def trace_oracle(spec, period=2 * math.pi):
    return float(np.trace(dop853_propagator(spec, [0.0], 0.0, period)))


def lyapunov_from_trace(tr, period=2 * math.pi):
    """ln of the spectral radius of a unimodular 2x2 matrix with trace tr, per unit time."""
    a = abs(tr)
    if a <= 2:
        return 0.0
    return math.log((a + math.sqrt(a * a - 4.0)) / 2.0) / period


def band_edge(make_spec, lo, hi, period=2 * math.pi):
    """E where |tr M| = 2 between lo and hi (bisection on the trace discriminant)."""
    return brentq(lambda E: abs(trace_oracle(make_spec(E), period)) - 2.0, lo, hi, xtol=1e-10)


def sigma_loop(ax, ap, bx, bp):
    """Symplectic form by explicit summation."""
    s = 0.0
    for i in range(len(ax)):
        s += ax[i] * bp[i] - ap[i] * bx[i]
    return s


def random_symplectic(rng, shears=6):
    """Products of shears and rotations, which are exactly symplectic in 2x2."""
    F = np.eye(2)
    for _ in range(shears):
        s = rng.uniform(-2, 2)
        c, r = math.cos(rng.uniform(0, 2 * math.pi)), math.sin(rng.uniform(0, 2 * math.pi))
        choice = rng.integers(3)
        if choice == 0:
            G = np.array([[1.0, s], [0.0, 1.0]])
        elif choice == 1:
            G = np.array([[1.0, 0.0], [s, 1.0]])
        else:
            n = math.hypot(c, r)
            G = np.array([[c / n, -r / n], [r / n, c / n]])
        F = G @ F
    return F
