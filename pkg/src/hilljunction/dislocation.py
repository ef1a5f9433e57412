"""Dislocation: the junction of p on x < 0 with p(. + t) on x > 0.

Roots are searched on the gap circle lam = mid - (width/2) cos(theta), theta in [0, 2 pi).
The upper half (sin theta > 0) is the physical sheet, the lower half is sheet 2, and the
branch b~ = sign(sin theta) b(lam) is analytic in theta through both edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .hill import monodromy
from .junction import ACCEPT_DEFECT, Side, _breaks_over, _integrate
from .potential import PeriodicPotential
from .spectrum import (BandStructure, DomainError, band_edges, dirichlet_spectrum, edge_eigenfunction,
                       neumann_spectrum)
from .weyl import m_from_monodromy, matching_defect

CIRCLE_POINTS = 800
DEGENERATE_TOL = 1e-8


def _b(mono, n):
    s = 1.0 if n % 2 == 0 else -1.0
    return s * math.sqrt(max(mono.discriminant, 0.0))


def dislocation_wronskian(p: PeriodicPotential, lam: float, t: float, sheet: int = 1, gap_index: int = 0):
    """m^+(lam, t) - m^-(lam, 0); sheet 2 uses the other branch of b on both sides."""
    if sheet not in (1, 2):
        raise ValueError("the dislocation surface has sheets 1 and 2 only")
    mt, m0 = monodromy(p, lam, t), monodromy(p, lam, 0.0)
    b = _b(m0, gap_index)
    if sheet == 2:
        b = -b
    return m_from_monodromy(mt, b, 1)[0] - m_from_monodromy(m0, b, -1)[0]


def phi_polefree(p: PeriodicPotential, lam: float, t: float, b: float | None = None, gap_index: int = 0):
    """b (theta_x^t + theta_x^0) + a^t theta_x^0 - a^0 theta_x^t, equal to w (a^t + b)(a^0 - b)."""
    mt, m0 = monodromy(p, lam, t), monodromy(p, lam, 0.0)
    if b is None:
        b = _b(m0, gap_index)
    return _phi(mt, m0, b)


def _phi(mt, m0, b):
    return b * (mt.theta1_x + m0.theta1_x) + (mt.a * m0.theta1_x - m0.a * mt.theta1_x)


@dataclass
class Trajectory:
    gap_index: int
    samples: list = field(default_factory=list)       # (t, lam, sheet, kind, branch)
    edge_events: list = field(default_factory=list)   # (t, branch, edge)
    diagnostics: list = field(default_factory=list)
    lo: float = math.nan
    hi: float = math.nan

    def branch(self, k):
        return [(t, lam, sh) for t, lam, sh, _, b in self.samples if b == k]

    def branches(self):
        return sorted({s[4] for s in self.samples})


class DislocationGap:
    """Root search for one open gap of p, both sheets at once."""

    def __init__(self, p: PeriodicPotential, n: int, band: BandStructure | None = None, points=CIRCLE_POINTS):
        self.p, self.n = p, n
        self.band = band or band_edges(p, max(n, 1))
        if n < 1 or not self.band.gap(n).open:
            raise DomainError(f"gap {n} is not open")
        g = self.band.gap(n)
        self.lo, self.hi = g.lo, g.hi
        self.mid, self.half = 0.5 * (g.lo + g.hi), 0.5 * (g.hi - g.lo)
        self.base = Side(p, 0.0, self.band)
        self.points = points
        h = 2 * math.pi / points
        self.grid = (np.arange(points) + 0.5) * h
        mu0 = dirichlet_spectrum(p, 0.0, n, self.band)[n - 1]
        nu0 = neumann_spectrum(p, 0.0, n, self.band)[1][n - 1]
        self.fixed_splits = self._both_sheets([mu0, nu0])

    def lam(self, th):
        return self.mid - self.half * math.cos(th)

    def theta(self, lam):
        return math.acos(min(1.0, max(-1.0, (self.mid - lam) / self.half)))

    def btilde(self, th, mono0):
        s = math.sin(th)
        return math.copysign(abs(_b(mono0, self.n)), s) * (1.0 if self.n % 2 == 0 else -1.0)

    def _both_sheets(self, lams):
        out = []
        for lam in lams:
            if self.lo < lam < self.hi:
                th = self.theta(lam)
                out += [th, 2 * math.pi - th]
        return out

    def parts(self, th, t):
        lam = self.lam(th)
        m0 = self.base.mono(lam)
        mt = monodromy(self.p, lam, t)
        b = self.btilde(th, m0)
        phi = _phi(mt, m0, b)
        m2 = m_from_monodromy(mt, b, 1)[0]
        m1 = m_from_monodromy(m0, b, -1)[0]
        return phi, m2 - m1, m2, m1

    def defect(self, th, t):
        lam = self.lam(th)
        m0 = self.base.mono(lam)
        b = self.btilde(th, m0)
        return matching_defect(monodromy(self.p, lam, t), b, m0, b)

    def genuine(self, th, t):
        return self.defect(th, t) <= ACCEPT_DEFECT

    def roots(self, t: float):
        """theta values of all states at shift t (both sheets)."""
        splits = list(self.fixed_splits)
        try:
            mu = dirichlet_spectrum(self.p, t, self.n, self.band)[self.n - 1]
            nu = neumann_spectrum(self.p, t, self.n, self.band)[1][self.n - 1]
            splits += self._both_sheets([mu, nu])
        except Exception:
            pass
        d = 1e-9
        xs = np.unique(np.concatenate([self.grid, [s - d for s in splits], [s + d for s in splits]]))
        xs = xs[(xs > 0) & (xs < 2 * math.pi)]
        f = lambda th: self.parts(th, t)[0]
        fs = np.array([f(x) for x in xs])
        out = []
        n = len(xs)
        for i in range(n):
            a, b = xs[i], xs[(i + 1) % n]
            fa, fb = fs[i], fs[(i + 1) % n]
            if i == n - 1:
                b += 2 * math.pi
            if fa == 0.0:
                r = a
            elif fa * fb < 0:
                r = brentq(lambda x: f(x % (2 * math.pi)), a, b, xtol=1e-15, rtol=4.5e-16 * 2, maxiter=200)
            else:
                continue
            r %= 2 * math.pi
            if self.genuine(r, t):
                out.append(r)
        return sorted(out)

    def z_at_edge(self, th, side):
        """Signed distance coordinate z with lam = alpha -+ z^2; z > 0 on the physical sheet."""
        if side < 0:
            return math.sqrt(2 * self.half) * math.sin(0.5 * (((th + math.pi) % (2 * math.pi)) - math.pi))
        return math.sqrt(2 * self.half) * math.cos(0.5 * th)


def _sheet(th):
    s = math.sin(th)
    if abs(s) < 1e-12:
        return 1, "edge"
    return (1, "eigenvalue") if s > 0 else (2, "resonance")


def _circ(a, b):
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def trace_trajectories(p: PeriodicPotential, gap_index: int, t_grid=None, band: BandStructure | None = None,
                       points=CIRCLE_POINTS) -> Trajectory:
    """States of the dislocation in one gap for every t of the grid, linked into branches."""
    if t_grid is None:
        t_grid = np.linspace(0.0, 2.0, 201)
    band = band or band_edges(p, max(gap_index, 1))
    if gap_index < 1 or gap_index > band.n_max or not band.gap(gap_index).open:
        return Trajectory(gap_index)
    dg = DislocationGap(p, gap_index, band, points)
    traj = Trajectory(gap_index, lo=dg.lo, hi=dg.hi)
    prev = {}       # branch -> theta
    next_label = 0
    tprev = None
    for t in t_grid:
        t = float(t)
        ths = dg.roots(t)
        by_sheet = {1: 0, 2: 0}
        for th in ths:
            by_sheet[_sheet(th)[0]] += 1
        if max(by_sheet.values()) > 2 or len(ths) > 4:
            traj.diagnostics.append(f"t={t:.6g}: {len(ths)} roots exceed the bound")
        # greedy nearest matching on the circle
        pairs = sorted((_circ(th, pth), i, k) for i, th in enumerate(ths) for k, pth in prev.items())
        window = math.pi / 2
        used_i, used_k, assign = set(), set(), {}
        for d, i, k in pairs:
            if i in used_i or k in used_k or d > window:
                continue
            assign[i] = k
            used_i.add(i)
            used_k.add(k)
        for k in prev:
            if k not in used_k:
                traj.diagnostics.append(f"t={t:.6g}: lost branch {k}")
        cur = {}
        for i, th in enumerate(ths):
            if i in assign:
                k = assign[i]
                old = prev[k]
                # edge crossings: theta passes 0 (alpha^-) or pi (alpha^+)
                for edge, ang in ((-1, 0.0), (1, math.pi)):
                    da = ((th - ang + math.pi) % (2 * math.pi)) - math.pi
                    do = ((old - ang + math.pi) % (2 * math.pi)) - math.pi
                    if da * do < 0 and abs(da - do) < math.pi:
                        traj.edge_events.append((t, k, edge))
            else:
                k = next_label
                next_label += 1
                if tprev is not None:
                    traj.diagnostics.append(f"t={t:.6g}: new branch {k} seeded by re-scan")
            cur[k] = th
            sh, kind = _sheet(th)
            traj.samples.append((t, dg.lam(th), sh, kind, k))
        prev = cur
        tprev = t
    return traj


def periodicity_check(traj: Trajectory, band: BandStructure | None = None, tol_t: float = 1e-9):
    """Residual of the shift-by-one law per branch.

    Even gap: |lam(t+1) - lam(t)|.  Odd gap: |lam(t+1) + lam(t) - alpha^- - alpha^+|, compared on
    the branch after following it across edge events.  Also returns the set residual (the state
    set of shift t+1 against that of shift t, which must agree exactly since the operators coincide).
    """
    if not traj.samples:
        return {"residual": 0.0, "set_residual": 0.0, "law": "vacuous"}
    n = traj.gap_index
    ssum = traj.lo + traj.hi
    by_t = {}
    for t, lam, sh, kind, k in traj.samples:
        by_t.setdefault(round(t, 9), []).append((lam, sh, k))
    ts = sorted(by_t)
    res, set_res = 0.0, 0.0
    for t in ts:
        t1 = round(t + 1.0, 9)
        if t1 not in by_t:
            continue
        a = {k: (lam, sh) for lam, sh, k in by_t[t]}
        b = {k: (lam, sh) for lam, sh, k in by_t[t1]}
        for k in a:
            if k not in b:
                continue
            if n % 2 == 0:
                res = max(res, abs(b[k][0] - a[k][0]))
            else:
                res = max(res, abs(b[k][0] + a[k][0] - ssum))
        sa = sorted((lam, sh) for lam, sh, _ in by_t[t])
        sb = sorted((lam, sh) for lam, sh, _ in by_t[t1])
        if len(sa) != len(sb):
            set_res = math.inf
        else:
            for (la, sha), (lb, shb) in zip(sa, sb):
                if sha == shb or min(abs(la - traj.lo), abs(la - traj.hi)) < 1e-9:
                    set_res = max(set_res, abs(la - lb))
                else:
                    set_res = math.inf
    return {"residual": res, "set_residual": set_res, "law": "translation" if n % 2 == 0 else "reflection"}


def branch_swap_residual(traj: Trajectory):
    """Odd gaps: the branch started at one edge sits at t+1 where the other branch sat at t."""
    by_t = {}
    for t, lam, sh, kind, k in traj.samples:
        by_t.setdefault(round(t, 9), {})[k] = lam
    res = 0.0
    for t, row in by_t.items():
        nxt = by_t.get(round(t + 1.0, 9))
        if not nxt or len(row) != 2 or len(nxt) != 2:
            continue
        k0, k1 = sorted(row)
        if traj.gap_index % 2:
            res = max(res, abs(nxt[k0] - row[k1]), abs(nxt[k1] - row[k0]))
        else:
            res = max(res, abs(nxt[k0] - row[k0]), abs(nxt[k1] - row[k1]))
    return res


# ---- small-shift asymptotics --------------------------------------------------

@dataclass
class EdgeAsymptote:
    n: int
    side: int
    alpha: float
    mass: float
    degenerate: bool
    psi_dot0: float
    density: object = field(repr=False)
    breaks: tuple = ()

    def z(self, t):
        if self.degenerate:
            return -self.side * t * math.sqrt(abs(self.mass) / 2) * self.psi_dot0 ** 2
        return math.sqrt(abs(self.mass) / 2) * _integrate(self.density, 0.0, t, self.breaks)

    def lam(self, t):
        z = self.z(t)
        return self.alpha - self.side * z * z, (1 if z > 0 else 2)


def edge_asymptote(p: PeriodicPotential, n: int, side: int, band: BandStructure | None = None) -> EdgeAsymptote:
    """z(t) ~ sqrt(|M|/2) int_0^t L(s, alpha) ds, or its linear form when Psi(0) = 0."""
    band = band or band_edges(p, max(n, 1))
    if n < 1 or not band.gap(n).open:
        raise DomainError(f"gap {n} is closed")
    psi = edge_eigenfunction(p, band, n, side)
    alpha = psi.alpha
    mu = dirichlet_spectrum(p, 0.0, n, band)[n - 1]
    degenerate = abs(mu - alpha) < DEGENERATE_TOL * (1 + abs(alpha))
    _, dpsi0 = psi.at(0.0)
    return EdgeAsymptote(n, side, alpha, psi.mass, degenerate, dpsi0, psi.L, _breaks_over(p, -1.0, 1.0))


def traced_z(dg: DislocationGap, t: float, side: int):
    """z of the state nearest the edge at shift t, from a full circle scan."""
    ths = dg.roots(t)
    if not ths:
        raise DomainError(f"no state at t={t}")
    ang = 0.0 if side < 0 else math.pi
    th = min(ths, key=lambda x: _circ(x, ang))
    return dg.z_at_edge(th, side)
