"""Invariant suite behind `hilljunction verify`.

Every check returns a Check; the report is plain text with fixed formatting so that two
runs on the same configuration give identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .hill import monodromy, solution_at
from .junction import InconsistencyError, Junction, count_predict_even, find_gap_states, ground_state_rules
from .junction import resolvent_kernel, swap_duality_check, swapped
from .potential import PeriodicPotential, evaluate, is_even, shift
from .spectrum import (BandStructure, band_edges, dirichlet_spectrum, edge_eigenfunction, neumann_spectrum,
                       trace_formula_residual, trubowitz_residual)
from .weyl import m_from_monodromy


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""
    skipped: bool = False

    def line(self):
        tag = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        res = "-" if self.skipped else f"{self.residual:.3e}"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{tag}] {self.name:<44s} residual={res:<10s} tol={self.tol:.1e}{extra}"


def _check(name, residual, tol, detail=""):
    residual = float(residual)
    return Check(name, bool(residual <= tol), residual, tol, detail)


def _skip(name, tol, why):
    return Check(name, True, 0.0, tol, why, skipped=True)


def _safe_t(p: PeriodicPotential, rng, margin=2e-3):
    bp = p.breakpoints_in_x(0.0) if p.kind == "piecewise" else np.array([])
    while True:
        t = float(rng.uniform(0.0, p.period))
        d = np.abs(((bp - t) + 0.5 * p.period) % p.period - 0.5 * p.period) if len(bp) else np.array([1.0])
        if d.min() > margin:
            return t


def _l1(p: PeriodicPotential):
    x = np.linspace(0.0, p.period, 4096, endpoint=False)
    return float(np.mean(np.abs(evaluate(p, x))) * p.period)


def _b(mono, n):
    return (1.0 if n % 2 == 0 else -1.0) * math.sqrt(max(mono.discriminant, 0.0))


# ---- potential ---------------------------------------------------------------

def potential_checks(p: PeriodicPotential, rng, label="p"):
    x = rng.uniform(-5.0, 5.0, 1000)
    per = max(float(np.max(np.abs(evaluate(p, x) - evaluate(p, x + k * p.period)))) for k in (1, -3))
    a, b = rng.uniform(-1, 1, 2)
    comp = float(np.max(np.abs(evaluate(shift(shift(p, a), b), x) - evaluate(shift(p, a + b), x))))
    out = [_check(f"{label}.periodicity", per, 1e-12 * max(1.0, p.bounds()[1] - p.bounds()[0]) if p.kind == "samples"
                  else 1e-12 * max(1.0, abs(p.bounds()[1]))),
           _check(f"{label}.shift_composition", comp, 1e-12 * max(1.0, abs(p.bounds()[1])))]
    if p.even_hint is None:
        out.append(_skip(f"{label}.even_hint", 0.0, "no hint given"))
    else:
        out.append(_check(f"{label}.even_hint", 0.0 if is_even(p) == p.even_hint else 1.0, 0.0))
    return out


# ---- Hill solver ---------------------------------------------------------------

def hill_checks(p: PeriodicPotential, band: BandStructure, rng, n=20, label="p"):
    lo, hi = band.lambda_floor, min(band.lambda_max, band.lambda_floor + 400.0)
    unim = tinv = dlam = ident = ric = 0.0
    for _ in range(n):
        lam = float(rng.uniform(lo, hi))
        t = _safe_t(p, rng)
        x = float(rng.uniform(0.0, p.period))
        s = solution_at(p, lam, t, x)
        unim = max(unim, abs(s.wronskian - 1.0) / max(1.0, abs(s.theta * s.phi_x) + abs(s.phi * s.theta_x)))
        m0, m1 = monodromy(p, lam, 0.0), monodromy(p, lam, 0.37 * p.period)
        tinv = max(tinv, abs(m0.delta - m1.delta) / (1.0 + abs(m0.delta)))
        h = 1e-4
        mp, mm = monodromy(p, lam + h, t), monodromy(p, lam - h, t)
        m = monodromy(p, lam, t)
        fd = np.array([mp.theta1 - mm.theta1, mp.theta1_x - mm.theta1_x, mp.phi1 - mm.phi1,
                       mp.phi1_x - mm.phi1_x]) / (2 * h)
        dl = np.array(m.d_lambda)
        dlam = max(dlam, float(np.max(np.abs(fd - dl)) / max(1.0, float(np.max(np.abs(dl))))))
        ident = max(ident, abs(m.a ** 2 + 1.0 - m.delta ** 2 + m.phi1 * m.theta1_x) / (1.0 + m.delta ** 2))
        # Riccati system in t
        ht = 1e-4
        a_, b_ = monodromy(p, lam, t + ht), monodromy(p, lam, t - ht)
        q = float(p(t)) - lam
        r1 = (a_.phi1 - b_.phi1) / (2 * ht) - 2 * m.a
        r2 = (a_.a - b_.a) / (2 * ht) - (-m.theta1_x + q * m.phi1)
        r3 = (a_.theta1_x - b_.theta1_x) / (2 * ht) - (-q) * 2 * m.a
        scale = 1.0 + abs(m.phi1) + abs(m.a) + abs(m.theta1_x) + abs(q) * (abs(m.phi1) + abs(m.a))
        ric = max(ric, max(abs(r1), abs(r2), abs(r3)) / scale)
    l1 = _l1(p)
    asym = 0.0
    for lam in (1e3, 1e4):
        k = math.sqrt(lam)
        phi = monodromy(p, lam, _safe_t(p, rng)).phi1
        bound = l1 * math.exp(l1 / k) / lam
        asym = max(asym, abs(phi - math.sin(k) / k) / max(bound, 1e-300))
    return [_check(f"{label}.hill.unimodular", unim, 1e-10),
            _check(f"{label}.hill.t_invariance", tinv, 1e-9),
            _check(f"{label}.hill.lambda_derivative", dlam, 1e-6),
            _check(f"{label}.hill.identity_a2_delta2", ident, 1e-8),
            _check(f"{label}.hill.riccati_t", ric, 1e-5),
            _check(f"{label}.hill.large_lambda", asym, 1.0, "ratio to the Volterra bound")]


# ---- spectrum ------------------------------------------------------------------

def spectrum_checks(p: PeriodicPotential, band: BandStructure, rng, label="p", heavy=True):
    out = []
    bad = 0.0
    prev = band.alpha0_plus
    for (lo, hi), g in zip(band.edges, band.gaps):
        if not (prev < lo <= hi):
            bad += 1
        prev = hi
    for n, g in enumerate(band.gaps, start=1):
        mu, nu = band.dirichlet[n - 1], band.neumann[n - 1]
        slack = 1e-9 * (1 + abs(g.hi))
        if not (g.lo - slack <= mu <= g.hi + slack and g.lo - slack <= nu <= g.hi + slack):
            bad += 1
        if g.open:
            Mm, Mp = band.masses[n]
            if not (Mm < 0 < Mp):
                bad += 1
    if band.neumann0 > band.alpha0_plus + 1e-9:
        bad += 1
    out.append(_check(f"{label}.spectrum.interlacing", bad, 0.0, "violations counted"))

    # Dirichlet asymptotics with the first Fourier-coefficient correction
    if p.kind == "constant":
        out.append(_skip(f"{label}.spectrum.dirichlet_asymptotics", 0.0, "constant potential"))
    elif heavy:
        big = band_edges(p, 40, with_spectra=False)
        t = 0.0
        mu = dirichlet_spectrum(p, t, 40, big)
        c0 = p.mean()
        x = np.linspace(0.0, p.period, 8192, endpoint=False)
        px = evaluate(p, x + t)
        worst = 0.0
        for n in range(20, 41):
            cn = float(np.mean(px * np.cos(2 * np.pi * n * x / p.period)))
            r = mu[n - 1] - (math.pi * n / p.period) ** 2 - c0 + cn
            worst = max(worst, n * abs(r))
        pmax = max(abs(v) for v in p.bounds())
        out.append(_check(f"{label}.spectrum.dirichlet_asymptotics", worst / (1.0 + pmax * pmax), 1.0,
                          "n |mu_n - (pi n)^2 - mean + c_n| / (1 + |p|^2), n in [20, 40]"))

    open_small = [g for g in band.gaps if g.open and g.n <= 2]
    if not open_small:
        out.append(_skip(f"{label}.spectrum.dirichlet_winding", 0.0, "no open gap n <= 2"))
    else:
        worst = 0
        for g in open_small:
            mid = 0.5 * (g.lo + g.hi)
            ts = np.arange(2000) * p.period / 2000
            v = np.array([monodromy(p, mid, t).phi1 for t in ts])
            crossings = int(np.sum(v * np.roll(v, -1) < 0))
            worst = max(worst, abs(crossings - 2 * g.n))
        out.append(_check(f"{label}.spectrum.dirichlet_winding", worst, 0.0, "midpoint crossings minus 2n"))

    if not any(g.open for g in band.gaps):
        out.append(_skip(f"{label}.spectrum.edge_curvature", 0.05, "no open gap"))
    else:
        out.append(_edge_curvature(p, band, label))

    # edge eigenfunctions: norm, parity, phi(1) = (-1)^n 2 M Psi^2
    worst = 0.0
    for g in band.gaps:
        if not g.open:
            continue
        for side in (-1, 1):
            psi = edge_eigenfunction(p, band, g.n, side)
            brk = tuple(p.breakpoints_in_x(0.0)) if p.kind == "piecewise" else ()
            cuts = brk + tuple(np.linspace(0.0, p.period, 9)[1:-1])
            norm = abs(_gl(lambda x: psi.at(x)[0] ** 2, 0.0, p.period, cuts) - 1.0)
            rho = 1.0 if g.n % 2 == 0 else -1.0
            par = abs(psi.at(p.period)[0] - rho * psi.at(0.0)[0])
            id35 = 0.0
            for _ in range(5):
                t = float(rng.uniform(0, p.period))
                u, _ = psi.at(t)
                phi = monodromy(p, psi.alpha, t).phi1
                id35 = max(id35, abs(phi - rho * 2 * psi.mass * u * u) / (1.0 + abs(phi)))
            worst = max(worst, norm, par, id35)
    out.append(_check(f"{label}.spectrum.edge_eigenfunction", worst, 1e-8, "norm, parity and phi(1)=2M Psi^2"))

    smooth = p.kind in ("fourier", "samples")
    if p.kind == "constant" or (smooth and heavy):
        N = 30 if smooth else band.n_max
        bigb = band if band.n_max >= N else band_edges(p, N)
        r = max(trace_formula_residual(p, t, N, bigb) for t in (0.0, 0.13, 0.5, 0.77))
        out.append(_check(f"{label}.spectrum.trace_formula", r, 1e-3))
    else:
        out.append(_skip(f"{label}.spectrum.trace_formula", 1e-3, "needs a continuously differentiable p"))
    if heavy:
        bigb = band_edges(p, 50, with_spectra=False)
        r = max(trubowitz_residual(p, t, lam, 50, bigb) for lam in (-5.0, -1.0) for t in (0.0, 0.3))
        out.append(_check(f"{label}.spectrum.dirichlet_product", r, 1e-4))
    return out


def _edge_curvature(p, band, label):
    g = next(g for g in band.gaps if g.open)
    worst = 0.0
    for side in (-1, 1):
        psi = edge_eigenfunction(p, band, g.n, side)
        alpha = psi.alpha
        zs = np.nonzero(psi.psi[:-1] * psi.psi[1:] < 0)[0]
        if len(zs) == 0:
            continue
        i = zs[0]
        t0 = brentq(lambda x: psi.at(x)[0], psi.x[i], psi.x[i + 1], xtol=1e-14)
        h = 2e-3
        f = lambda t: (lambda lam: monodromy(p, lam, t).phi1)
        mus = []
        for t in (t0 - h, t0 + h):
            fn = f(t)
            mus.append(brentq(fn, g.lo, g.hi, xtol=1e-15, rtol=1e-15) if fn(g.lo) * fn(g.hi) < 0 else alpha)
        mdd = (mus[0] - 2 * alpha + mus[1]) / (h * h)
        m0 = monodromy(p, alpha, t0)
        dphi = m0.d_lambda[2]
        pred = -4 * psi.mass / dphi ** 2
        worst = max(worst, abs(mdd - pred) / abs(pred))
    return _check(f"{label}.spectrum.edge_curvature", worst, 0.05, "second t-derivative of mu at an edge")


# ---- Weyl functions --------------------------------------------------------------

def _gl(f, a, b, breaks=(), nodes=24):
    cuts = [a] + sorted(x for x in breaks if a < x < b) + [b]
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    s = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        xm, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s += hw * sum(w * f(xm + hw * x) for x, w in zip(xg, wg))
    return s


def weyl_checks(p: PeriodicPotential, band: BandStructure, rng, label="p", n=20):
    T = p.period
    brk = tuple(p.breakpoints_in_x(0.0)) if p.kind == "piecewise" else ()
    samples = [(band.alpha0_plus - 1.0 - 5.0 * float(rng.random()), 0)]
    for g in band.gaps:
        if g.open:
            samples.append((g.lo + (0.2 + 0.6 * float(rng.random())) * g.width, g.n))
    ric = prod = 0.0
    for k in range(n):
        lam, gi = samples[k % len(samples)]
        t = _safe_t(p, rng)
        h = 1e-5
        ms = [monodromy(p, lam, t + d) for d in (-h, 0.0, h)]
        if min(abs(m.phi1) for m in ms) < 1e-3:
            continue
        b = _b(ms[1], gi)
        for side in (1, -1):
            mv = [m_from_monodromy(m, b, side)[0] for m in ms]
            lhs = (mv[2] - mv[0]) / (2 * h)
            rhs = (float(p(t)) - lam) - mv[1] ** 2
            ric = max(ric, abs(lhs - rhs) / (1.0 + abs(rhs) + mv[1] ** 2))
        mp, mm = m_from_monodromy(ms[1], b, 1)[0], m_from_monodromy(ms[1], b, -1)[0]
        ref = -ms[1].theta1_x / ms[1].phi1
        prod = max(prod, abs(mp * mm - ref) / (1.0 + abs(ref)))
    out = [_check(f"{label}.weyl.riccati_t", ric, 1e-6), _check(f"{label}.weyl.product", prod, 1e-8)]

    # mean of zeta below the first gap and the sum rule at alpha_0^+
    zeta = lambda lam: (lambda t: (lambda m: m.a / m.phi1)(monodromy(p, lam, t)))
    top = band.gaps[0].lo if band.gaps and band.gaps[0].open else band.edges[0][0]
    r1 = max(abs(_gl(zeta(lam), 0.0, T, brk)) for lam in (band.alpha0_plus - 1.0, 0.5 * (band.alpha0_plus + top)))
    z0 = zeta(band.alpha0_plus)
    r2 = abs(_gl(lambda t: z0(t) ** 2, 0.0, T, brk) / T - (p.mean() - band.alpha0_plus))
    out.append(_check(f"{label}.weyl.zeta_mean_zero", r1, 1e-5))
    out.append(_check(f"{label}.weyl.zeta_square_sum_rule", r2, 1e-5))

    # sign facts below nu_0
    worst = 0.0
    for _ in range(n):
        t = float(rng.uniform(0, T))
        nu0 = neumann_spectrum(p, t, 1, band)[0]
        lam = nu0 - 1e-3 - 10.0 * float(rng.random())
        m = monodromy(p, lam, t)
        b = _b(m, 0)
        mp, mm = m_from_monodromy(m, b, 1)[0], m_from_monodromy(m, b, -1)[0]
        worst = max(worst, max(mp, 0.0), max(-mm, 0.0))
    out.append(_check(f"{label}.weyl.sign_below_nu0", worst, 0.0))

    # phi(1) zeta_t = side (-1)^n 2 M L at an open edge
    worst, tested = 0.0, 0
    for g in band.gaps:
        if not g.open:
            continue
        for side in (-1, 1):
            psi = edge_eigenfunction(p, band, g.n, side)
            for _ in range(3):
                t = _safe_t(p, rng)
                if abs(psi.at(t)[0]) < 0.1:
                    continue
                h = 1e-5
                zf = zeta(psi.alpha)
                zdot = (zf(t + h) - zf(t - h)) / (2 * h)
                lhs = monodromy(p, psi.alpha, t).phi1 * zdot
                rhs = side * (-1) ** g.n * 2 * psi.mass * psi.L(t)
                worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-3))
                tested += 1
        break
    if tested:
        out.append(_check(f"{label}.weyl.edge_L_identity", worst, 0.05))
    else:
        out.append(_skip(f"{label}.weyl.edge_L_identity", 0.05, "no open gap"))
    return out


# ---- junction ------------------------------------------------------------------

def junction_checks(j: Junction, rng, label="junction"):
    out = []
    gaps = j.gaps()
    bad = 0
    for g in gaps:
        ok1 = any(lo <= g.lo and g.hi <= hi for n, lo, hi in j.left.gap_set() if n == g.n1)
        ok2 = any(lo <= g.lo and g.hi <= hi for n, lo, hi in j.right.gap_set() if n == g.n2)
        bad += (not ok1) + (not ok2)
    sig = j.sigma_sets()
    bad += 0 if sig[2] else 1
    out.append(_check(f"{label}.gap_intersection", bad, 0.0))
    over, interior, below = 0, 0, 0
    gs = ground_state_rules(j)
    roots1 = {}
    for g in gaps:
        for sheet in (1, 2, 3, 4):
            try:
                rs = [r for r in find_gap_states(j, g, sheet, check_bound=False) if not r.borderline]
            except InconsistencyError:
                rs = [0, 0, 0]
            over += max(0, len(rs) - 2)
            if sheet == 1:
                roots1[g.index] = rs
                interior += sum(not (g.lo < r.lam < g.hi) for r in rs)
                below += sum(r.lam <= gs["lower_bound"] for r in rs)
    out.append(_check(f"{label}.count_bound", over, 0.0, "roots beyond two per gap and sheet"))
    out.append(_check(f"{label}.no_embedded", interior, 0.0))
    out.append(_check(f"{label}.nothing_below_nu0", below, 0.0))
    g0 = gaps[0]
    if gs["count_if_positive"]:
        out.append(_check(f"{label}.ground_state_rule", abs(len(roots1[0]) - 1), 0.0))
    else:
        out.append(_skip(f"{label}.ground_state_rule", 0.0, "w <= 0 (or zero) at the top of the infinite gap"))
    if j.t == 0.0 and is_even(j.p1) and is_even(j.p2):
        mism = 0
        for g in gaps:
            pred = count_predict_even(j, g)
            if pred != "indeterminate" and pred != len(roots1[g.index]):
                mism += 1
        out.append(_check(f"{label}.even_sign_rule", mism, 0.0))
    else:
        out.append(_skip(f"{label}.even_sign_rule", 0.0, "needs even sides at zero shift"))
    jt = swapped(j)
    pw, match = 0.0, 0.0
    for g in gaps:
        d = swap_duality_check(j, g, 20, jt)
        pw = max(pw, d["pointwise"])
        match = max(match, d["root_match"] if not d["unmatched"] else math.inf)
    out.append(_check(f"{label}.swap_duality_pointwise", pw, 1e-10))
    out.append(_check(f"{label}.swap_duality_roots", match, 1e-8))
    sym = 0.0
    lam = g0.hi - 1.0 - float(rng.random())
    for _ in range(5):
        x, y = rng.uniform(-3, 3, 2)
        r1, r2 = resolvent_kernel(j, x, y, lam, g0), resolvent_kernel(j, y, x, lam, g0)
        sym = max(sym, abs(r1 - r2) / (1.0 + abs(r1)))
    pos = resolvent_kernel(j, 0.0, 0.0, min(gs["lower_bound"], g0.hi) - 1.0, g0)
    out.append(_check(f"{label}.resolvent_symmetry", sym, 1e-10))
    out.append(_check(f"{label}.resolvent_positive", 0.0 if pos > 0 else 1.0, 0.0))
    return out


# ---- dislocation ---------------------------------------------------------------------

def dislocation_checks(p: PeriodicPotential, band: BandStructure, t_grid, gaps=None, label="dislocation"):
    from .dislocation import (DislocationGap, branch_swap_residual, dislocation_wronskian, periodicity_check,
                              trace_trajectories)
    out = []
    open_gaps = [g.n for g in band.gaps if g.open]
    if gaps:
        open_gaps = [n for n in open_gaps if n in gaps]
    if not open_gaps:
        return [_skip(f"{label}.periodicity", 1e-6, "no open gap")]
    for n in open_gaps:
        tr = trace_trajectories(p, n, t_grid, band)
        counts = {}
        for t, lam, sh, kind, k in tr.samples:
            counts.setdefault((round(t, 12), sh), 0)
            counts[(round(t, 12), sh)] += 1
        tot = {}
        for (t, sh), c in counts.items():
            tot[t] = tot.get(t, 0) + c
        over = sum(max(0, c - 2) for c in counts.values()) + sum(max(0, c - 4) for c in tot.values())
        out.append(_check(f"{label}.gap{n}.count_bound", over, 0.0))
        out.append(_check(f"{label}.gap{n}.tracking", len([d for d in tr.diagnostics if "lost" in d]), 0.0,
                          "lost branches"))
        if t_grid[-1] - t_grid[0] >= 1.0 - 1e-12:
            pc = periodicity_check(tr, band)
            out.append(_check(f"{label}.gap{n}.periodicity_{pc['law']}", pc["residual"], 1e-6))
            out.append(_check(f"{label}.gap{n}.state_set_period_one", pc["set_residual"], 1e-6))
            out.append(_check(f"{label}.gap{n}.branch_swap", branch_swap_residual(tr), 1e-6))
        # Phi roots are zeros of w; sheet-2 roots are eigenvalues of the reversed junction
        dg = DislocationGap(p, n, band)
        wres, dual = 0.0, 0.0
        for t, lam, sh, kind, k in tr.samples[:: max(1, len(tr.samples) // 10)]:
            if kind == "edge":
                continue
            th = dg.theta(lam) if sh == 1 else 2 * math.pi - dg.theta(lam)
            phi, w, m2, m1 = dg.parts(th, t)
            if math.isfinite(w):
                wres = max(wres, abs(w) / (1.0 + abs(m1) + abs(m2)))
            if sh == 2:
                jr = Junction(shift(p, t), p, 0.0, band.n_max, band.lambda_max)
                g = jr.gap_of(lam)
                found = [r.lam for r in find_gap_states(jr, g, 1) if not r.borderline]
                dual = max(dual, min((abs(x - lam) for x in found), default=math.inf))
        out.append(_check(f"{label}.gap{n}.polefree_matches_w", wres, 1e-8))
        out.append(_check(f"{label}.gap{n}.reversed_duality", dual, 1e-8))
    return out


# ---- half-solid -------------------------------------------------------------------------

def halfsolid_checks(p: PeriodicPotential, s: float, t: float, n_max: int, label="half-solid"):
    from .halfsolid import HalfSolid, ground_state_prediction, hs_counts, hs_wronskian
    h = HalfSolid(s, p, n_max=n_max)
    out = []
    j = h.junction(t)
    bad = 0
    for g in j.gaps():
        ref = h.band.gap(g.n2)
        if not (abs(g.hi - min(ref.hi, s)) <= 1e-12 * (1 + abs(s)) and (g.infinite or g.lo == ref.lo)):
            bad += 1
    out.append(_check(f"{label}.gap_rule", bad, 0.0))
    c = hs_counts(h, t)
    out.append(_check(f"{label}.counting_rules", len(c["issues"]), 0.0, "; ".join(c["issues"])))
    gp = ground_state_prediction(h, t)
    if gp["m_plus"] > 0:
        thr = gp["threshold"]
        mism = 0
        for ds in np.concatenate([-np.geomspace(1e-1, 1e-6, 10), np.geomspace(1e-6, 1e-1, 10)]):
            if thr + ds <= gp["nu0"]:
                continue
            hh = HalfSolid(float(thr + ds), p, n_max=n_max)
            jj = hh.junction(t)
            cnt = len([r for r in find_gap_states(jj, jj.gaps()[0], 1) if not r.borderline])
            mism += cnt != (1 if ds < 0 else 0)
        out.append(_check(f"{label}.ground_threshold_sweep", mism, 0.0, f"threshold {thr:.12g}"))
    else:
        jj = h.junction(t)
        cnt = len([r for r in find_gap_states(jj, jj.gaps()[0], 1) if not r.borderline])
        out.append(_check(f"{label}.no_ground_state", cnt, 0.0, "m+ at alpha_0^+ is negative"))
    g1 = next((g for g in h.band.gaps if g.open), None)
    if p.kind != "constant" and g1 is not None and g1.n == 1 and s > g1.lo:
        lam = 0.5 * (g1.lo + min(g1.hi, s))
        d = abs(hs_wronskian(h, lam, t, 3, 1) - hs_wronskian(h, lam, t, 4, 1))
        out.append(_check(f"{label}.four_sheets_distinct", 0.0 if d > 1e-8 else 1.0, 0.0))
    else:
        out.append(_skip(f"{label}.four_sheets_distinct", 0.0, "needs s above the first gap"))
    return out


# ---- driver ------------------------------------------------------------------------------

def run_suite(cfg, heavy=True):
    rng = np.random.default_rng(cfg.seed)
    checks = []
    sides = [("right", cfg.right)]
    if cfg.mode == "junction" and cfg.left is not None:
        sides.insert(0, ("left", cfg.left))
    bands = {}
    for name, p in sides:
        band = band_edges(p, cfg.n_max, lambda_max=cfg.lambda_max)
        bands[name] = band
        checks += potential_checks(p, rng, name)
        checks += hill_checks(p, band, rng, label=name)
        checks += spectrum_checks(p, band, rng, label=name, heavy=heavy)
        checks += weyl_checks(p, band, rng, label=name)
    if cfg.mode == "junction":
        j = Junction(cfg.left, cfg.right, cfg.t, cfg.n_max, cfg.lambda_max)
        checks += junction_checks(j, rng)
    elif cfg.mode == "dislocation":
        checks += dislocation_checks(cfg.right, bands["right"], cfg.t_grid(), cfg.gaps)
    elif cfg.mode == "half-solid":
        checks += halfsolid_checks(cfg.right, cfg.s, cfg.t, cfg.n_max)
    return checks


def report(checks, cfg) -> str:
    head = [f"# hilljunction verify: mode={cfg.mode} n_max={cfg.n_max} seed={cfg.seed}",
            f"# config={cfg.source}"]
    body = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    tail = [f"# {len(checks)} checks, {failed} failed, {sum(c.skipped for c in checks)} skipped"]
    return "\n".join(head + body + tail) + "\n"
