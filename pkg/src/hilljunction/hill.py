"""Fundamental solutions of -y'' + p(x+t) y = lam y over one period."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernel
from .potential import PeriodicPotential

# local error per unit length requested from the Magnus integrator
MAGNUS_TOL = 1e-13
MAX_STEPS = 2_000_000


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MonodromyData:
    theta1: float
    theta1_x: float
    phi1: float
    phi1_x: float
    d_lambda: tuple  # (theta, theta_x, phi, phi_x) differentiated in lambda
    lam: float
    t: float

    @property
    def wronskian(self):
        return self.theta1 * self.phi1_x - self.theta1_x * self.phi1

    @property
    def delta(self):
        return 0.5 * (self.phi1_x + self.theta1)

    @property
    def a(self):
        return 0.5 * (self.phi1_x - self.theta1)

    @property
    def discriminant(self):
        """Delta^2 - 1 written as a^2 + phi theta_x; keeps relative accuracy inside narrow gaps."""
        return self.a * self.a + self.phi1 * self.theta1_x

    @property
    def delta_prime(self):
        return 0.5 * (self.d_lambda[3] + self.d_lambda[0])

    def matrix(self):
        return np.array([[self.theta1, self.phi1], [self.theta1_x, self.phi1_x]])


@dataclass(frozen=True)
class SolutionSample:
    x: float
    theta: float
    theta_x: float
    phi: float
    phi_x: float

    @property
    def wronskian(self):
        return self.theta * self.phi_x - self.theta_x * self.phi


def _propagate(p: PeriodicPotential, lam: float, t: float, x: float):
    """Fundamental matrix and its lam-derivative at x in [0, period] for p(. + t)."""
    Y = np.array([1.0, 0.0, 0.0, 1.0])
    D = np.zeros(4)
    if x <= 0.0:
        return Y, D
    if p.is_piecewise:
        L, v = p.segments(t)
        edges = np.concatenate([[0.0], np.cumsum(L)])
        edges[-1] = p.period
        k = np.searchsorted(edges, x, side="left")
        lengths = np.append(L[:k - 1], x - edges[k - 1]) if k >= 1 else np.array([x])
        _kernel.propagate_segments(np.ascontiguousarray(lengths, float), np.ascontiguousarray(v[:k], float),
                                   float(lam), Y, D)
        return Y, D
    code, T, off, K = p.kernel_data()
    n, _ = _kernel.magnus_integrate(code, T, (off + t) % T, K, float(lam), 0.0, float(x), Y, D,
                                    MAGNUS_TOL, T / 64.0, MAX_STEPS)
    if n >= MAX_STEPS:
        raise IntegrationError(f"step budget exhausted at lam={lam}, t={t}; residual {abs(Y[0]*Y[3]-Y[1]*Y[2]-1):.2e}")
    return Y, D


def monodromy(p: PeriodicPotential, lam: float, t: float = 0.0) -> MonodromyData:
    """theta, theta_x, phi, phi_x at x = period with their lambda-derivatives."""
    Y, D = _propagate(p, lam, t, p.period)
    return MonodromyData(Y[0], Y[2], Y[1], Y[3], (D[0], D[2], D[1], D[3]), float(lam), float(t))


def solution_at(p: PeriodicPotential, lam: float, t: float, x: float) -> SolutionSample:
    """Fundamental solutions at x; points outside [0, period] use powers of the monodromy."""
    T = p.period
    k = int(np.floor(x / T))
    r = x - k * T
    if r >= T:  # rounding
        k, r = k + 1, 0.0
    Y, _ = _propagate(p, lam, t, r)
    F = np.array([[Y[0], Y[1]], [Y[2], Y[3]]])
    if k != 0:
        M, _ = _propagate(p, lam, t, T)
        M = np.array([[M[0], M[1]], [M[2], M[3]]])
        F = F @ np.linalg.matrix_power(M if k > 0 else np.linalg.inv(M), abs(k))
    return SolutionSample(float(x), F[0, 0], F[1, 0], F[0, 1], F[1, 1])


def solution_grid(p: PeriodicPotential, lam: float, t: float, x):
    """Fundamental solutions at increasing points x in [0, period]; columns theta, theta_x, phi, phi_x."""
    x = np.asarray(x, float)
    out = np.empty((len(x), 4))
    if p.is_piecewise:
        for i, xi in enumerate(x):
            Y, _ = _propagate(p, lam, t, xi)
            out[i] = Y[0], Y[2], Y[1], Y[3]
        return out
    code, T, off, K = p.kernel_data()
    xs = x if x[0] == 0.0 else np.concatenate([[0.0], x])
    buf = np.empty((len(xs), 8))
    _kernel.magnus_grid(code, T, (off + t) % T, K, float(lam), xs, MAGNUS_TOL, buf)
    buf = buf[len(xs) - len(x):]
    return buf[:, [0, 2, 1, 3]].copy()


def lyapunov(p: PeriodicPotential, lam: float, t: float = 0.0):
    """Delta, Delta' and a(lam, t)."""
    m = monodromy(p, lam, t)
    return {"delta": m.delta, "delta_prime": m.delta_prime, "a": m.a}
