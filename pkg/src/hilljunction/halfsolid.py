"""Half-solid: constant level s on x < 0 against a periodic potential p(x + t) on x > 0."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .hill import monodromy
from .junction import GapRoot, JGap, Junction, _breaks_over, _integrate, find_gap_states
from .potential import PeriodicPotential, constant
from .spectrum import DomainError, band_edges, default_lambda_max, edge_eigenfunction, neumann_spectrum
from .weyl import decaying_vector, flips_b, m_from_monodromy

SCAN_POINTS = 400


@dataclass
class HalfSolid:
    s: float
    right: PeriodicPotential
    n_max: int = 8
    lambda_max: float | None = None

    def __post_init__(self):
        if self.lambda_max is None:
            self.lambda_max = max(default_lambda_max(self.right, self.n_max), self.s + 1.0)
        self.band = band_edges(self.right, self.n_max, lambda_max=self.lambda_max)
        self.left = constant(self.s, self.right.period)
        self._base = Junction(self.left, self.right, 0.0, self.n_max, self.lambda_max, right_band=self.band)

    def junction(self, t: float = 0.0) -> Junction:
        return self._base.with_shift(t)

    def gaps(self, t: float = 0.0):
        """gamma_n(H) intersected with (-inf, s)."""
        return self.junction(t).gaps()


def hs_wronskian(h: HalfSolid, lam: float, t: float, sheet: int = 1, gap_index: int = 0) -> float:
    """m^+(lam, t) -+ sqrt(s - lam); the sign of the root flips on sheets 2 and 3."""
    if lam > h.s:
        raise DomainError(f"lambda={lam} lies above the constant level s={h.s}")
    mono = monodromy(h.right, lam, t)
    sgn = 1.0 if gap_index % 2 == 0 else -1.0
    b = sgn * math.sqrt(max(mono.discriminant, 0.0))
    if flips_b(sheet, "right"):
        b = -b
    r = math.sqrt(h.s - lam)
    if flips_b(sheet, "left"):
        r = -r
    return m_from_monodromy(mono, b, 1)[0] - r


def ground_state_prediction(h: HalfSolid, t: float = 0.0):
    """Count in the infinite gap from the sign of m^+ at alpha_0^+ and the level window."""
    a0 = h.band.alpha0_plus
    mono = monodromy(h.right, a0, t)
    mplus = m_from_monodromy(mono, 0.0, 1)[0]
    nu0 = neumann_spectrum(h.right, t, 1, h.band)[0]
    thr = a0 + mplus ** 2
    if mplus < 0:
        pred = 0
    else:
        pred = 1 if nu0 < h.s < thr else 0
    return {"m_plus": mplus, "nu0": nu0, "threshold": thr, "predicted": pred}


def hs_counts(h: HalfSolid, t: float = 0.0, even_rules: bool | None = None):
    """Direct sheet-1 and sheet-4 counts per gap with the sum, sign and ground-state rules."""
    j = h.junction(t)
    rows = []
    issues = []
    if even_rules is None:
        from .potential import is_even
        even_rules = t == 0.0 and is_even(h.right)
    for g in j.gaps():
        c1 = [r for r in find_gap_states(j, g, 1) if not r.borderline]
        c4 = [r for r in find_gap_states(j, g, 4) if not r.borderline]
        row = {"gap": g, "n": g.n2, "sheet1": len(c1), "sheet4": len(c4), "roots1": c1, "roots4": c4}
        if g.n2 > 0 and g.hi_owner in ("right", "both") and h.s > g.hi:
            row["sum_rule"] = len(c1) + len(c4) == 1
            if even_rules:
                mu, nu = h.band.dirichlet[g.n2 - 1], h.band.neumann[g.n2 - 1]
                row["sign_rule"] = len(c1) == (1 if mu > nu else 0)
            if not row["sum_rule"] or not row.get("sign_rule", True):
                issues.append(f"gap {g.n2}: sheet1={len(c1)} sheet4={len(c4)}")
        if g.index == 0:
            gp = ground_state_prediction(h, t)
            row.update(gp)
            row["ground_rule"] = gp["predicted"] == len(c1)
            if not row["ground_rule"]:
                issues.append(f"ground state: predicted {gp['predicted']}, found {len(c1)}")
        rows.append(row)
    return {"rows": rows, "issues": issues}


def hs_matching_roots(h: HalfSolid, n: int, side: int, refine: int = 1):
    """Shifts y in [0, T) with Psi_y(y) = sqrt(s - alpha) Psi(y) at the edge alpha_n^side."""
    psi = edge_eigenfunction(h.right, h.band, n, side)
    alpha = psi.alpha
    if h.s <= alpha:
        raise DomainError("the edge must lie below the constant level")
    k = math.sqrt(h.s - alpha)
    T = h.right.period
    if refine > 1:
        xs = np.linspace(0.0, T, (len(psi.x) - 1) * refine + 1)
        vals = np.array([np.subtract(*(lambda u: (u[1], k * u[0]))(psi.at(x))) for x in xs])
    else:
        xs = psi.x
        vals = psi.psi_x - k * psi.psi
    g = lambda y: (lambda u: u[1] - k * u[0])(psi.at(y))
    roots = []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(g, xs[i], xs[i + 1], xtol=1e-14))
    return [r for r in roots if r < T]


@dataclass
class HalfSolidPrediction:
    z: float
    lam: float
    sheet: int


def hs_edge_asymptote(h: HalfSolid, n: int, side: int, y: float, t: float, printed: bool = False):
    """State near alpha_n^side for the shift y + t, y a matching root.

    The default is the first-order solution z = -+ sqrt(2|M|) Psi(y)^2 int_0^t [p(y+tau) - s] dtau
    (upper sign at alpha^-).  printed=True evaluates sqrt(|M|/2) Psi(y)^2 int_0^t [p(y+tau) - alpha]
    instead, kept for comparison.
    """
    g = h.band.gap(n)
    if not g.open or h.s <= g.hi:
        raise DomainError("needs an open gap lying below s")
    psi = edge_eigenfunction(h.right, h.band, n, side)
    u, _ = psi.at(y)
    M = abs(psi.mass)
    brk = _breaks_over(h.right, y, y + t)
    if printed:
        z = math.sqrt(M / 2) * u * u * _integrate(lambda x: float(h.right(x)) - psi.alpha, y, y + t, brk)
    else:
        z = side * math.sqrt(2 * M) * u * u * _integrate(lambda x: float(h.right(x)) - h.s, y, y + t, brk)
    lam = psi.alpha - side * z * z
    return HalfSolidPrediction(z, lam, 1 if z > 0 else 4)


def hs_interior_roots(h: HalfSolid, points: int = SCAN_POINTS):
    """Shifts y in [0, T) with m^+(s, y) = 0 (s strictly inside a gap of H)."""
    T = h.right.period
    gi = _gap_of_level(h)
    sgn = 1.0 if gi % 2 == 0 else -1.0

    def mvec(y):
        mono = monodromy(h.right, h.s, y)
        b = sgn * math.sqrt(max(mono.discriminant, 0.0))
        return decaying_vector(mono, b, 1)

    f = lambda y: monodromy(h.right, h.s, y).theta1_x
    ys = np.linspace(0.0, T, points + 1)
    fs = [f(y) for y in ys]
    out = []
    for i in range(points):
        if fs[i] * fs[i + 1] < 0 or fs[i] == 0.0:
            r = ys[i] if fs[i] == 0.0 else brentq(f, ys[i], ys[i + 1], xtol=1e-14)
            v = mvec(r)
            if abs(v[1]) < 1e-6:
                out.append(float(r))
    return out


def _gap_of_level(h: HalfSolid) -> int:
    if h.s < h.band.alpha0_plus:
        return 0
    for g in h.band.gaps:
        if g.open and g.lo < h.s < g.hi:
            return g.n
    raise DomainError(f"s={h.s} is not strictly inside a gap of the periodic side")


def hs_interior_asymptote(h: HalfSolid, y: float, t: float) -> HalfSolidPrediction:
    """z = int_0^t [p(y+tau) - s] dtau and lam = s - z^2; z < 0 is a sheet-3 resonance."""
    _gap_of_level(h)
    z = _integrate(lambda x: float(h.right(x)) - h.s, y, y + t, _breaks_over(h.right, y, y + t))
    return HalfSolidPrediction(z, h.s - z * z, 1 if z > 0 else 3)


def scanned_z(h: HalfSolid, t: float, alpha: float, side: int, sheets=(1, 4)):
    """Signed z of the scanned state nearest alpha: + on sheet 1, - on the resonance sheet."""
    j = h.junction(t)
    best = None
    for g in j.gaps():
        if not (g.contains(alpha, 1e-9 * (1 + abs(alpha)))):
            continue
        for sh in sheets:
            for r in find_gap_states(j, g, sh):
                if r.borderline:
                    continue
                d = abs(r.lam - alpha)
                if best is None or d < best[0]:
                    best = (d, r)
    if best is None:
        raise DomainError(f"no state near {alpha} at t={t}")
    d, r = best
    return (1.0 if r.sheet == 1 else -1.0) * math.sqrt(d), r
