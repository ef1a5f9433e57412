"""Junction of two periodic half-line potentials: gaps, Wronskians, gap states and rules.

The operator is -y'' + q y with q = p1 on x < 0 and q = p2(x + t) on x > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .hill import MonodromyData, monodromy, solution_at
from .potential import PeriodicPotential, is_even, shift
from .spectrum import (BandStructure, DomainError, EdgeEigenfunction, band_edges, default_lambda_max,
                       dirichlet_spectrum, edge_eigenfunction, neumann_spectrum)
from .weyl import flips_b, m_from_monodromy, matching_defect

GRID_POINTS = 400
ROOT_TOL = 1e-8
ACCEPT_DEFECT = 1e-6
W_ZERO_TOL = 1e-10


class InconsistencyError(RuntimeError):
    pass


class Side:
    """One half-line: potential, shift and band structure, with memoized monodromy."""

    def __init__(self, p: PeriodicPotential, t: float, band: BandStructure):
        self.p, self.t, self.band = p, float(t), band
        self._memo: dict = {}

    def mono(self, lam) -> MonodromyData:
        m = self._memo.get(lam)
        if m is None:
            m = monodromy(self.p, lam, self.t)
            if len(self._memo) > 200_000:
                self._memo.clear()
            self._memo[lam] = m
        return m

    def b(self, lam, n, mono=None):
        mono = mono or self.mono(lam)
        s = 1.0 if n % 2 == 0 else -1.0
        return s * math.sqrt(max(mono.discriminant, 0.0))

    def gap_set(self):
        """[(n, lo, hi)] of open gaps including gap 0."""
        out = [(0, -math.inf, self.band.alpha0_plus)]
        out += [(g.n, g.lo, g.hi) for g in self.band.gaps if g.open]
        return out


@dataclass
class JGap:
    index: int            # ordinal of the gap of T, 0 for the infinite one
    lo: float
    hi: float
    n1: int               # gap index on the left side
    n2: int               # gap index on the right side
    lo_owner: str         # "left", "right", "both" or "none" (for -inf)
    hi_owner: str

    @property
    def infinite(self):
        return not math.isfinite(self.lo)

    def contains(self, lam, slack=0.0):
        return self.lo - slack <= lam <= self.hi + slack


@dataclass
class GapRoot:
    lam: float
    gap: JGap
    sheet: int
    kind: str
    residual: float
    borderline: bool = False
    theta: float = math.nan


def _owner(x, e1, e2):
    tol = 1e-12 * (1 + abs(x))
    a = abs(x - e1) <= tol
    b = abs(x - e2) <= tol
    return "both" if a and b else ("left" if a else ("right" if b else "none"))


class Junction:
    def __init__(self, left: PeriodicPotential, right: PeriodicPotential, t: float = 0.0, n_max: int = 8,
                 lambda_max: float | None = None, left_side: Side | None = None, right_band=None):
        lmax = lambda_max
        if lmax is None:
            lmax = max(default_lambda_max(left, n_max), default_lambda_max(right, n_max))
        self.n_max = n_max
        self.lambda_max = lmax
        if left_side is None:
            left_side = Side(left, 0.0, band_edges(left, n_max, lambda_max=lmax))
        self.left = left_side
        self.right = Side(right, t, right_band or band_edges(right, n_max, lambda_max=lmax))
        self.t = float(t)
        self.floor = min(self.left.band.lambda_floor, self.right.band.lambda_floor)

    @property
    def p1(self):
        return self.left.p

    @property
    def p2(self):
        return self.right.p

    def with_shift(self, t):
        return Junction(self.p1, self.p2, t, self.n_max, self.lambda_max, left_side=self.left,
                        right_band=self.right.band)

    # ---- spectral sets ---------------------------------------------------
    def gaps(self):
        return junction_gaps(self)

    def sigma_sets(self):
        """Band intervals of sigma^(2) = common spectrum, sigma^(3) = left only, sigma^(4) = right only."""
        top = self.lambda_max

        def bands(side):
            out, lo = [], side.band.alpha0_plus
            for g in side.band.gaps:
                if g.open:
                    out.append((lo, g.lo))
                    lo = g.hi
            out.append((lo, top))
            return out

        b1, b2 = bands(self.left), bands(self.right)
        s2 = [(max(a[0], b[0]), min(a[1], b[1])) for a in b1 for b in b2 if max(a[0], b[0]) < min(a[1], b[1])]
        g1 = [(lo, hi) for _, lo, hi in self.left.gap_set()]
        g2 = [(lo, hi) for _, lo, hi in self.right.gap_set()]
        s3 = [(max(a[0], b[0]), min(a[1], b[1])) for a in b1 for b in g2 if max(a[0], b[0]) < min(a[1], b[1])]
        s4 = [(max(a[0], b[0]), min(a[1], b[1])) for a in b2 for b in g1 if max(a[0], b[0]) < min(a[1], b[1])]
        return {2: s2, 3: s3, 4: s4}

    # ---- Wronskian -------------------------------------------------------
    def branches(self, lam, sheet, gap: JGap):
        m1o = self.left.mono(lam)
        m2o = self.right.mono(lam)
        b1 = self.left.b(lam, gap.n1, m1o)
        b2 = self.right.b(lam, gap.n2, m2o)
        if flips_b(sheet, "left"):
            b1 = -b1
        if flips_b(sheet, "right"):
            b2 = -b2
        return m1o, b1, m2o, b2

    def parts(self, lam, sheet, gap: JGap):
        m1o, b1, m2o, b2 = self.branches(lam, sheet, gap)
        m2 = m_from_monodromy(m2o, b2, 1)[0]
        m1 = m_from_monodromy(m1o, b1, -1)[0]
        return m2 - m1, m2, m1

    def polefree(self, lam, sheet, gap: JGap):
        """w phi_1 phi_2: smooth across Dirichlet points, zero at states and at non-pole Dirichlet points."""
        m1o, b1, m2o, b2 = self.branches(lam, sheet, gap)
        return (m2o.a - b2) * m1o.phi1 - (m1o.a + b1) * m2o.phi1

    def defect(self, lam, sheet, gap: JGap):
        m1o, b1, m2o, b2 = self.branches(lam, sheet, gap)
        return matching_defect(m2o, b2, m1o, b1)

    def w(self, lam, sheet=1, gap: JGap | None = None):
        gap = gap or self.gap_of(lam)
        return self.parts(lam, sheet, gap)[0]

    def gap_of(self, lam) -> JGap:
        for g in self.gaps():
            if g.contains(lam, 1e-12 * (1 + abs(lam))):
                return g
        raise DomainError(f"lambda={lam} is not in a gap of the junction")

    # ---- circle parametrization of a gap -----------------------------------
    def lam_of_theta(self, gap: JGap, theta):
        if gap.infinite:
            return gap.hi - (gap.hi - (self.floor - 1.0)) * 0.5 * (1.0 - np.cos(theta))
        mid, half = 0.5 * (gap.lo + gap.hi), 0.5 * (gap.hi - gap.lo)
        return mid - half * np.cos(theta)

    def theta_of_lam(self, gap: JGap, lam):
        if gap.infinite:
            c = 1.0 - 2.0 * (gap.hi - lam) / (gap.hi - (self.floor - 1.0))
        else:
            c = (0.5 * (gap.lo + gap.hi) - lam) / (0.5 * (gap.hi - gap.lo))
        return float(np.arccos(np.clip(c, -1.0, 1.0)))

    def poles(self, gap: JGap):
        """Dirichlet points of either side inside the gap."""
        out = []
        if gap.n2 > 0:
            out += dirichlet_spectrum(self.p2, self.t, gap.n2, self.right.band)[gap.n2 - 1:gap.n2]
        if gap.n1 > 0:
            out += dirichlet_spectrum(self.p1, 0.0, gap.n1, self.left.band)[gap.n1 - 1:gap.n1]
        return [m for m in out if gap.lo < m < gap.hi]


def junction_gaps(j: Junction) -> list:
    """Components of gamma(H1) and gamma(H2) intersected, with per-side provenance."""
    out = []
    for n1, lo1, hi1 in j.left.gap_set():
        for n2, lo2, hi2 in j.right.gap_set():
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi and hi <= j.lambda_max:
                out.append((lo, hi, n1, n2, lo1, lo2, hi1, hi2))
    out.sort()
    gaps = []
    for k, (lo, hi, n1, n2, lo1, lo2, hi1, hi2) in enumerate(out):
        gaps.append(JGap(k, lo, hi, n1, n2, _owner(lo, lo1, lo2) if math.isfinite(lo) else "none",
                         _owner(hi, hi1, hi2)))
    return gaps


def scan_roots(f, a, b, n, split=(), pole_eps=1e-9, accept=None, near=None):
    """Sign-change roots of f on [a, b] with a uniform grid plus split points.

    Endpoints are evaluated but roots sitting exactly on them are returned separately.
    Returns (roots, borderline, endpoint_zeros).
    """
    xs = np.linspace(a, b, n)
    extra = []
    for s in split:
        if a < s < b:
            d = pole_eps * max(1.0, abs(s))
            extra += [s - d, s + d]
    xs = np.unique(np.concatenate([xs, extra]))
    fs = np.array([f(x) for x in xs])
    roots, border, ends = [], [], []
    for i in range(len(xs) - 1):
        f0, f1 = fs[i], fs[i + 1]
        if not (np.isfinite(f0) and np.isfinite(f1)):
            continue
        if f0 == 0.0:
            (ends if i == 0 else roots).append(xs[i])
            continue
        if f0 * f1 < 0:
            r = brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
            if accept is None or accept(r):
                roots.append(r)
    if fs[-1] == 0.0:
        ends.append(xs[-1])
    # tangential near-zeros, measured by `near` (default |f|)
    g = near or (lambda x: abs(f(x)))
    af = np.abs(fs)
    for i in range(1, len(xs) - 1):
        if af[i] < af[i - 1] and af[i] < af[i + 1] and fs[i - 1] * fs[i] > 0 and fs[i] * fs[i + 1] > 0:
            res = minimize_scalar(g, bounds=(xs[i - 1], xs[i + 1]), method="bounded", options={"xatol": 1e-14})
            if res.fun < ROOT_TOL:
                border.append(res.x)
    return roots, border, ends


def find_gap_states(j: Junction, gap: JGap, sheet: int = 1, grid: int = GRID_POINTS, check_bound=True):
    """All simple zeros of the sheet's Wronskian in the open gap, pole-aware."""
    lam_of = lambda th: float(j.lam_of_theta(gap, th))
    f = lambda th: j.polefree(lam_of(th), sheet, gap)
    genuine = lambda th: j.defect(lam_of(th), sheet, gap) <= ACCEPT_DEFECT
    split = [j.theta_of_lam(gap, m) for m in j.poles(gap)]
    roots, border, _ = scan_roots(f, 0.0, math.pi, grid, split, accept=genuine,
                                  near=lambda th: j.defect(lam_of(th), sheet, gap))
    out = []
    for th in sorted(roots):
        lam = lam_of(th)
        if not (gap.lo < lam < gap.hi):
            continue
        w = j.parts(lam, sheet, gap)[0]
        res = abs(w) if math.isfinite(w) else j.defect(lam, sheet, gap)
        out.append(GapRoot(lam, gap, sheet, "eigenvalue" if sheet == 1 else "resonance", res, False, th))
    for th in border:
        lam = lam_of(th)
        out.append(GapRoot(lam, gap, sheet, "borderline", j.defect(lam, sheet, gap), True, th))
    out.sort(key=lambda r: r.lam)
    if check_bound and sum(not r.borderline for r in out) > 2:
        raise InconsistencyError(f"{len(out)} roots in gap {gap.index} on sheet {sheet}: "
                                 + ", ".join(f"{r.lam:.12g}" for r in out))
    return out


def all_states(j: Junction, sheets=(1,), grid=GRID_POINTS):
    out = []
    for g in j.gaps():
        for s in sheets:
            out += find_gap_states(j, g, s, grid)
    return out


# ---- counting rules --------------------------------------------------------

def count_predict_even(j: Junction, gap: JGap, tol: float = 1e-9):
    """Sign-rule prediction (0, 1 or 'indeterminate') for even potentials at zero shift."""
    if not (is_even(j.p1) and is_even(shift(j.p2, j.t))):
        raise DomainError("count_predict_even needs even potentials at zero shift")
    b1, b2 = j.left.band, j.right.band
    mu2 = dirichlet_spectrum(j.p2, j.t, max(gap.n2, 1), b2)
    nu2 = neumann_spectrum(j.p2, j.t, max(gap.n2, 1), b2)[1]
    if gap.n1 == 0 and gap.n2 == 0:
        return 0
    if gap.n1 > 0:
        d1 = b1.dirichlet[gap.n1 - 1] - b1.neumann[gap.n1 - 1]
    if gap.n2 > 0:
        d2 = mu2[gap.n2 - 1] - nu2[gap.n2 - 1]
    if gap.n1 > 0 and gap.n2 > 0:
        if abs(d1) <= tol or abs(d2) <= tol:
            return "indeterminate"
        return 0 if d1 * d2 > 0 else 1
    # one infinite gap
    if gap.n1 == 0:
        d, mu, top = d2, mu2[gap.n2 - 1], b1.alpha0_plus
    else:
        d, mu, top = d1, b1.dirichlet[gap.n1 - 1], b2.alpha0_plus
    if abs(d) <= tol:
        return "indeterminate"
    if d < 0:
        return 0
    if abs(mu - top) <= tol:
        return "indeterminate"
    return 1 if mu < top else "indeterminate"


def ground_state_rules(j: Junction):
    """Lower bound nu^0 and the w > 0 criterion at the top of the infinite gap."""
    nu01 = neumann_spectrum(j.p1, 0.0, 1, j.left.band)[0]
    nu02 = neumann_spectrum(j.p2, j.t, 1, j.right.band)[0]
    g0 = j.gaps()[0]
    top = g0.hi
    w_top = j.w(top, 1, g0)
    # |w| at rounding level means a threshold state sitting on the edge: no prediction
    positive = bool(w_top > W_ZERO_TOL * (1.0 + math.sqrt(abs(top))))
    return {"lower_bound": min(nu01, nu02), "top": top, "w_top": w_top, "count_if_positive": positive,
            "predicted": 1 if positive else None}


def swapped(j: Junction) -> Junction:
    """Left and right exchanged: q = p2(x + t) on x < 0, p1 on x > 0."""
    return Junction(shift(j.p2, j.t), j.p1, 0.0, j.n_max, j.lambda_max)


def swap_duality_check(j: Junction, gap: JGap, points: int = 20, jt: Junction | None = None):
    """Pointwise w_T(lam on sheet 2) + w_swapped(lam) and eigenvalue/resonance matching."""
    jt = jt or swapped(j)
    gt = next(g for g in jt.gaps() if abs(g.hi - gap.hi) <= 1e-9 * (1 + abs(gap.hi))
              and (g.infinite == gap.infinite) and (gap.infinite or abs(g.lo - gap.lo) <= 1e-9 * (1 + abs(gap.lo))))
    th = (np.arange(points) + 0.5) * math.pi / points
    pw = 0.0
    for x in th:
        lam = float(j.lam_of_theta(gap, x))
        w2 = j.w(lam, 2, gap)
        w1 = jt.w(lam, 1, gt)
        if np.isfinite(w2) and np.isfinite(w1):
            pw = max(pw, abs(w2 + w1) / (1.0 + abs(w1)))
    eig = [r.lam for r in find_gap_states(j, gap, 1) if not r.borderline]
    res = [r.lam for r in find_gap_states(jt, gt, 2) if not r.borderline]
    match = 0.0
    unmatched = []
    for e in eig:
        if not res:
            unmatched.append(e)
            continue
        d = min(abs(e - r) for r in res)
        match = max(match, d)
    return {"pointwise": pw, "root_match": match, "unmatched": unmatched, "eigenvalues": eig, "resonances": res}


# ---- small-shift edge predictor ----------------------------------------------

@dataclass
class EdgePredictor:
    case: str                  # "right-edge", "equal-edges" or "left-edge"
    alpha: float
    side: int                  # -1 lower edge, +1 upper edge
    resonance_sheet: int       # sheet of the state when z < 0
    density: object = field(repr=False)   # s -> calL(s)
    base: float = 0.0
    breaks: tuple = ()

    def __call__(self, tau):
        """z(tau) = integral of calL over [base, base + tau]."""
        return _integrate(self.density, self.base, self.base + tau, self.breaks)

    def lam(self, z):
        return self.alpha - self.side * z * z


def _integrate(f, a, b, breaks=(), nodes=24):
    if a == b:
        return 0.0
    sgn = 1.0
    if b < a:
        a, b, sgn = b, a, -1.0
    cuts = [a] + sorted(x for x in breaks if a < x < b) + [b]
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        xm, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += hw * sum(w * f(xm + hw * x) for x, w in zip(xg, wg))
    return sgn * total


def _breaks_over(p: PeriodicPotential, a, b):
    if p.kind != "piecewise":
        return ()
    bp = p.breakpoints_in_x(0.0)
    T = p.period
    out = []
    for k in range(int(math.floor(a / T)) - 1, int(math.ceil(b / T)) + 1):
        out += [x + k * T for x in bp]
    return tuple(x for x in out if a < x < b)


def edge_predictor_L(j: Junction, gap: JGap, side: int = -1, match_tol: float = 1e-6) -> EdgePredictor:
    """Case-selected density calL for a state leaving the gap edge as the right shift grows."""
    alpha = gap.lo if side < 0 else gap.hi
    owner = gap.lo_owner if side < 0 else gap.hi_owner
    if owner == "none":
        raise DomainError("the infinite gap has no lower edge")
    d = j.defect(alpha, 1, gap)
    if not d <= match_tol:
        raise DomainError(f"matching condition fails at the edge: defect={d:.3e}")
    t0 = j.t
    psi2 = edge_eigenfunction(j.p2, j.right.band, gap.n2, side) if owner in ("right", "both") else None
    psi1 = edge_eigenfunction(j.p1, j.left.band, gap.n1, side) if owner in ("left", "both") else None
    sgn = -side  # L carries -+ : + at the lower edge
    if owner == "right":
        M2 = abs(psi2.mass)

        def dens(s):
            return math.sqrt(2 * M2) * psi2.L(s)
        case, sheet = "right-edge", 4
    elif owner == "left":
        M1 = abs(psi1.mass)
        u1, du1 = psi1.at(0.0)

        def dens(s):
            return sgn * math.sqrt(2 * M1) * (du1 ** 2 - (float(j.p2(s)) - alpha) * u1 ** 2)
        case, sheet = "left-edge", 3
    else:
        M1, M2 = abs(psi1.mass), abs(psi2.mass)
        u1, _ = psi1.at(0.0)

        def dens(s):
            u2, _ = psi2.at(s)
            r = 1.0 + math.sqrt(M2 / M1) * u2 ** 2 / u1 ** 2
            return math.sqrt(2 * M2) * psi2.L(s) / r
        case, sheet = "equal-edges", 2
    breaks = _breaks_over(j.p2, t0 - 1.0, t0 + 1.0)
    return EdgePredictor(case, alpha, side, sheet, dens, t0, breaks)


# ---- resolvent ----------------------------------------------------------------

def resolvent_kernel(j: Junction, x: float, x_prime: float, lam: float, gap: JGap | None = None) -> float:
    """Green function of the junction, normalized to be positive below the spectrum."""
    gap = gap or j.gap_of(lam)
    w, m2, m1 = j.parts(lam, 1, gap)
    if abs(w) < ROOT_TOL or not math.isfinite(w):
        raise ZeroDivisionError(f"lambda={lam} is an eigenvalue of the junction")

    def sol(m, y):
        if y >= 0:
            s = solution_at(j.p2, lam, j.t, y)
        else:
            s = solution_at(j.p1, lam, 0.0, y)
        return s.theta + m * s.phi

    hi, lo = max(x, x_prime), min(x, x_prime)
    # Wronskian psi_-' psi_+ - psi_- psi_+' at 0 is -w
    return -sol(m2, hi) * sol(m1, lo) / w
