"""Weyl functions m^{+-}(lam, t), the log-derivative zeta and Bloch solutions."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .hill import MonodromyData, monodromy, solution_at
from .potential import PeriodicPotential
from .spectrum import DomainError, b_from_monodromy


class PoleError(ArithmeticError):
    pass


@dataclass(frozen=True)
class WeylValue:
    value: float
    side: int          # +1 or -1
    sheet: int
    pole_proximity: float
    pole: bool


def pole_tol(lam):
    return 1e-9 * (1.0 + abs(lam))


def flips_b(sheet: int, role: str = "right") -> bool:
    """Whether b changes sign for a side playing `role` on the given sheet.

    sheet 2 flips both sides, sheet 3 the left side only, sheet 4 the right side only.
    """
    if sheet not in (1, 2, 3, 4):
        raise ValueError(f"sheet must be 1..4, got {sheet}")
    return sheet == 2 or (sheet == 3 and role == "left") or (sheet == 4 and role == "right")


def m_from_monodromy(mono: MonodromyData, b: float, side: int):
    """(m, denominator, pole) for m^side = (a - side*b)/phi.

    The parallel representation m^+ = -theta_x/(a + b) (and m^- = -theta_x/(a - b)) takes over
    where the first form degenerates to 0/0 at a Dirichlet point that is not a pole.
    """
    a, phi, thx = mono.a, mono.phi1, mono.theta1_x
    num1, den1 = a - side * b, phi
    num2, den2 = -thx, a + side * b
    if math.hypot(num1, den1) >= math.hypot(num2, den2):
        num, den = num1, den1
    else:
        num, den = num2, den2
    if den == 0.0:
        return math.copysign(math.inf, num), 0.0, True
    return num / den, den, False


def decaying_vector(mono: MonodromyData, b: float, side: int):
    """Unit vector along (1, m^side): initial data at 0 of the solution decaying towards side*inf."""
    r1 = (mono.phi1, mono.a - side * b)
    r2 = (mono.a + side * b, -mono.theta1_x)
    v = r1 if math.hypot(*r1) >= math.hypot(*r2) else r2
    n = math.hypot(*v)
    return (v[0] / n, v[1] / n) if n > 0 else (math.nan, math.nan)


def matching_defect(mono_right: MonodromyData, b_right: float, mono_left: MonodromyData, b_left: float) -> float:
    """|sin| of the angle between the right-decaying and left-decaying data; 0 exactly at a state."""
    u = decaying_vector(mono_right, b_right, 1)
    v = decaying_vector(mono_left, b_left, -1)
    return abs(u[0] * v[1] - u[1] * v[0])


def weyl_pair(mono: MonodromyData, b: float):
    """(m^+, m^-) for a given branch value b."""
    return m_from_monodromy(mono, b, 1)[0], m_from_monodromy(mono, b, -1)[0]


def weyl_m(p: PeriodicPotential, lam: float, t: float, side: int, sheet: int = 1, gap_index: int = 0,
           role: str = "right") -> WeylValue:
    """m^side(lam, t) on the given sheet; lam must lie in the closure of gap `gap_index`."""
    mono = monodromy(p, lam, t)
    b = b_from_monodromy(mono, gap_index)
    if flips_b(sheet, role):
        b = -b
    val, den, _ = m_from_monodromy(mono, b, side)
    near = abs(mono.phi1)
    pole = abs(den) < pole_tol(lam) * (1.0 + abs(mono.a) + abs(b))
    return WeylValue(val, side, sheet, near, pole)


def zeta(p: PeriodicPotential, lam: float, t: float) -> float:
    """phi_t(1)/(2 phi(1)) = a/phi."""
    mono = monodromy(p, lam, t)
    if abs(mono.phi1) < pole_tol(lam):
        raise PoleError(f"lambda={lam} is a Dirichlet eigenvalue of p(.+{t})")
    return mono.a / mono.phi1


def bloch_psi(p: PeriodicPotential, x: float, lam: float, side: int, gap_index: int = 0, t: float = 0.0,
              sheet: int = 1) -> float:
    """psi_side(x) = theta(x) + m^side phi(x)."""
    w = weyl_m(p, lam, t, side, sheet, gap_index)
    if w.pole or not math.isfinite(w.value):
        raise PoleError("m has a pole here; use the Dirichlet-normalized solution phi instead")
    s = solution_at(p, lam, t, x)
    return s.theta + w.value * s.phi


__all__ = ["WeylValue", "PoleError", "DomainError", "weyl_m", "zeta", "bloch_psi", "weyl_pair",
           "m_from_monodromy", "flips_b", "pole_tol",
           "decaying_vector", "matching_defect"]
