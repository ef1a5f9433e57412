"""Band edges, Dirichlet/Neumann spectra, effective masses and band-edge eigenfunctions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .hill import monodromy, solution_at, solution_grid
from .potential import PeriodicPotential

GAP_TOL = 1e-9
EDGE_TOL = 1e-14
N_SAMPLES = 2049
SCAN_STEPS_PER_PI = 16


class NumericalError(RuntimeError):
    pass


class DomainError(ValueError):
    pass


@dataclass
class Gap:
    n: int
    lo: float
    hi: float
    open: bool

    @property
    def width(self):
        return self.hi - self.lo


@dataclass
class BandStructure:
    potential: PeriodicPotential
    alpha0_plus: float
    edges: list            # (alpha_n^-, alpha_n^+) for n = 1..n_max
    gaps: list             # Gap objects, n = 1..n_max
    dirichlet: list        # mu_n(p, 0), n = 1..n_max
    neumann0: float
    neumann: list          # nu_n(p, 0), n = 1..n_max
    masses: dict           # n -> (M^-, M^+) for open gaps, n = 0 -> (None, M_0^+)
    lambda_max: float
    lambda_floor: float
    partial: bool = False
    degenerate_edges: list = field(default_factory=list)

    @property
    def n_max(self):
        return len(self.edges)

    def gap(self, n):
        if n == 0:
            return Gap(0, -math.inf, self.alpha0_plus, True)
        return self.gaps[n - 1]

    def open_gaps(self):
        return [g for g in self.gaps if g.open]

    def edge(self, n, side):
        """alpha_n^side, side in {-1, +1}; n = 0 only has the + edge."""
        if n == 0:
            if side < 0:
                raise DomainError("gap 0 has no lower edge")
            return self.alpha0_plus
        return self.edges[n - 1][0 if side < 0 else 1]

    def mass(self, n, side):
        m = self.masses.get(n)
        if m is None:
            raise DomainError(f"gap {n} is closed: effective mass undefined")
        val = m[0 if side < 0 else 1]
        if val is None:
            raise DomainError(f"no effective mass at edge ({n}, {side})")
        return val


def _root(f, lo, hi, what, xtol=None):
    """Zero of f on [lo, hi]; a touching zero at an endpoint is accepted."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) != np.sign(fhi):
        xt = xtol if xtol is not None else 1e-15 * max(1.0, abs(lo), abs(hi))
        return brentq(f, lo, hi, xtol=xt, rtol=1e-15, maxiter=200)
    # both ends of one sign: the zero sits (within edge rounding) at the nearer end
    scale = 1e-7 * max(1.0, abs(lo), abs(hi))
    if hi - lo < scale or min(abs(flo), abs(fhi)) < 1e-2 * max(abs(flo), abs(fhi)):
        return lo if abs(flo) <= abs(fhi) else hi
    raise NumericalError(f"{what}: no sign change on [{lo!r}, {hi!r}] (values {flo:.3e}, {fhi:.3e})")


def default_lambda_max(p: PeriodicPotential, n_max: int) -> float:
    lo, hi = p.bounds()
    return (math.pi * (n_max + 2) / p.period) ** 2 + max(abs(lo), abs(hi))


def _delta(p, lam):
    return monodromy(p, lam, 0.0).delta


def _discriminant(m):
    """Delta^2 - 1 with the noise level of its terms.

    Near a narrow gap every term is small, so this keeps relative accuracy where Delta - 1
    itself is lost in rounding.
    """
    return m.discriminant, abs(m.a) + abs(m.phi1) + abs(m.theta1_x)


def _edge_function(p, s):
    """Delta - s, evaluated through the discriminant when Delta sits on the s side."""
    def f(lam):
        m = monodromy(p, lam, 0.0)
        if s * m.delta > 0.0:
            return _discriminant(m)[0] / (m.delta + s)
        return m.delta - s
    return f


def _delta_prime(p, lam):
    return monodromy(p, lam, 0.0).delta_prime


_CACHE: dict = {}


def band_edges(p: PeriodicPotential, n_max: int, tol: float = GAP_TOL, lambda_max: float | None = None,
               with_spectra: bool = True) -> BandStructure:
    """Band edges up to the n_max-th gap with Dirichlet/Neumann data and effective masses."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    key = (id(p), n_max, tol, lambda_max, with_spectra)
    hit = _CACHE.get(key)
    if hit is not None and hit.potential is p:
        return hit
    pmin, _ = p.bounds()
    floor = pmin - 1.0
    top = default_lambda_max(p, n_max) if lambda_max is None else float(lambda_max)
    step = math.pi / (SCAN_STEPS_PER_PI * p.period)
    k = np.arange(0.0, math.sqrt(top - floor) + step, step)
    lam = floor + k ** 2
    mono = [monodromy(p, x, 0.0) for x in lam]
    D = np.array([m.delta for m in mono])
    Dp = np.array([m.delta_prime for m in mono])

    # lowest band edge: Delta decreases through +1
    below = np.nonzero(D < 1.0)[0]
    if len(below) == 0:
        raise NumericalError("scan ceiling reached before the first band")
    i0 = below[0]
    alpha0 = _root(lambda x: _delta(p, x) - 1.0, lam[i0 - 1], lam[i0], "alpha_0^+") if i0 > 0 else lam[0]

    # one extremum of Delta per gap; they are sign changes of Delta'
    ext = []
    for i in range(i0, len(lam) - 1):
        if Dp[i] == 0.0:
            ext.append(lam[i])
        elif Dp[i] * Dp[i + 1] < 0:
            ext.append(brentq(lambda x: _delta_prime(p, x), lam[i], lam[i + 1], xtol=1e-15 * max(1, abs(lam[i])),
                              rtol=1e-15))
    partial = len(ext) < n_max + 1
    n_found = min(n_max, len(ext))
    edges, gaps, masses, degenerate = [], [], {}, []
    prev = alpha0
    for n in range(1, n_found + 1):
        lam_e = ext[n - 1]
        sgn = (-1.0) ** n
        me = monodromy(p, lam_e, 0.0)
        disc, noise = _discriminant(me)
        nxt = ext[n] if n < len(ext) else top
        if sgn * me.delta < 0.0 or disc <= EDGE_TOL * noise:
            lo = hi = lam_e
        else:
            f = _edge_function(p, sgn)
            lo = _root(f, prev, lam_e, f"alpha_{n}^-")
            hi = _root(f, lam_e, nxt, f"alpha_{n}^+")
            if hi - lo < tol:
                lo = hi = 0.5 * (lo + hi)
        edges.append((lo, hi))
        gaps.append(Gap(n, lo, hi, hi > lo))
        prev = hi
    bs = BandStructure(p, alpha0, edges, gaps, [], math.nan, [], masses, top, floor, partial, degenerate)
    effective_masses(p, bs)
    if with_spectra:
        bs.dirichlet = dirichlet_spectrum(p, 0.0, n_found, bs)
        nu0, nus = neumann_spectrum(p, 0.0, n_found, bs)
        bs.neumann0, bs.neumann = nu0, nus
    _CACHE[key] = bs
    if len(_CACHE) > 256:
        _CACHE.pop(next(iter(_CACHE)))
    return bs


def effective_masses(p: PeriodicPotential, band: BandStructure) -> BandStructure:
    """M = -Delta Delta' at open edges; a failed sign check marks the edge degenerate."""
    m0 = monodromy(p, band.alpha0_plus, 0.0)
    band.masses[0] = (None, -m0.delta * m0.delta_prime)
    for g in band.gaps:
        if not g.open:
            continue
        out = []
        for side, lam in ((-1, g.lo), (1, g.hi)):
            m = monodromy(p, lam, 0.0)
            M = -m.delta * m.delta_prime
            if side * M <= 0:
                band.degenerate_edges.append((g.n, side))
            out.append(M)
        band.masses[g.n] = tuple(out)
    return band


def _spectrum(p, t, n_max, band, entry, what):
    out = []
    for n in range(1, n_max + 1):
        lo, hi = band.edges[n - 1]
        if hi == lo:
            out.append(lo)
            continue
        f = lambda x: getattr(monodromy(p, x, t), entry)
        out.append(_root(f, lo, hi, f"{what}_{n}(t={t})"))
    return out


def dirichlet_spectrum(p: PeriodicPotential, t: float, n_max: int, band: BandStructure | None = None):
    """mu_n(p, t): zeros of phi(1, ., t) inside the closed gaps."""
    band = band or band_edges(p, n_max, with_spectra=False)
    return _spectrum(p, t, min(n_max, band.n_max), band, "phi1", "mu")


def neumann_spectrum(p: PeriodicPotential, t: float, n_max: int, band: BandStructure | None = None):
    """(nu_0, [nu_n]) : zeros of theta_x(1, ., t); nu_0 lies below alpha_0^+."""
    band = band or band_edges(p, n_max, with_spectra=False)
    f = lambda x: monodromy(p, x, t).theta1_x
    nu0 = _root(f, band.lambda_floor, band.alpha0_plus, "nu_0")
    return nu0, _spectrum(p, t, min(n_max, band.n_max), band, "theta1_x", "nu")


def b_from_delta(delta: float, n: int, tol: float = 1e-9) -> float:
    """(-1)^n sqrt(Delta^2 - 1) for Delta on the gap-n side of the band."""
    s = 1.0 if n % 2 == 0 else -1.0
    if s * delta < 1.0 - tol:
        raise DomainError(f"Delta={delta!r} is not in the closure of gap {n}")
    return s * math.sqrt(max(delta * delta - 1.0, 0.0))


def b_from_monodromy(mono, n: int, tol: float = 1e-9) -> float:
    """(-1)^n sqrt(Delta^2 - 1) from the stable discriminant; Delta must be on the gap-n side."""
    s = 1.0 if n % 2 == 0 else -1.0
    if s * mono.delta < 1.0 - tol:
        raise DomainError(f"Delta={mono.delta!r} is not in the closure of gap {n}")
    return s * math.sqrt(max(mono.discriminant, 0.0))


def gap_branch_b(p: PeriodicPotential, lam: float, gap_index: int, band: BandStructure | None = None) -> float:
    """b(lam) = (-1)^n sqrt(Delta^2 - 1) on the closure of gap n."""
    if band is not None:
        g = band.gap(gap_index)
        slack = 1e-12 * (1 + abs(lam))
        if not (g.lo - slack <= lam <= g.hi + slack):
            raise DomainError(f"lambda={lam} outside gap {gap_index}")
    return b_from_monodromy(monodromy(p, lam, 0.0), gap_index)


@dataclass
class EdgeEigenfunction:
    potential: PeriodicPotential
    n: int
    side: int
    alpha: float
    mass: float
    coeffs: tuple          # Psi = c0 theta + c1 phi (normalized)
    x: np.ndarray
    psi: np.ndarray
    psi_x: np.ndarray

    @property
    def parity(self):
        return "periodic" if self.n % 2 == 0 else "antiperiodic"

    def at(self, x):
        """(Psi, Psi_x) at any real x."""
        s = solution_at(self.potential, self.alpha, 0.0, x)
        c0, c1 = self.coeffs
        return c0 * s.theta + c1 * s.phi, c0 * s.theta_x + c1 * s.phi_x

    def L(self, s):
        """Edge function L(s) = -+[Psi_x^2 - (p(s) - alpha) Psi^2], upper sign for alpha^+."""
        psi, dpsi = self.at(s)
        return -self.side * (dpsi ** 2 - (self.potential(s) - self.alpha) * psi ** 2)


def _square_norm(p, lam, v, pieces=8, nodes=32):
    """Integral of (v0 theta + v1 phi)^2 over one period by Gauss-Legendre on smooth pieces."""
    T = p.period
    cuts = set(np.linspace(0.0, T, pieces + 1).tolist())
    if p.is_piecewise:
        cuts.update(float(b) for b in p.breakpoints_in_x(0.0) if 0.0 < b < T)
    cuts = sorted(cuts)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        xs.append(0.5 * (lo + hi) + 0.5 * (hi - lo) * xg)
        ws.append(0.5 * (hi - lo) * wg)
    xs, ws = np.concatenate(xs), np.concatenate(ws)
    sol = solution_grid(p, lam, 0.0, xs)
    return float(np.dot(ws, (v[0] * sol[:, 0] + v[1] * sol[:, 2]) ** 2))


def edge_eigenfunction(p: PeriodicPotential, band: BandStructure, n: int, side: int,
                       n_samples: int = N_SAMPLES) -> EdgeEigenfunction:
    """Real normalized (anti)periodic eigenfunction at alpha_n^side."""
    if n > 0 and not band.gap(n).open:
        raise DomainError(f"gap {n} is closed")
    alpha = band.edge(n, side)
    m = monodromy(p, alpha, 0.0)
    rho = 1.0 if n % 2 == 0 else -1.0
    if abs(m.delta - rho) > 1e-7:
        raise NumericalError(f"monodromy at alpha_{n} is not {'periodic' if rho > 0 else 'antiperiodic'}")
    v1 = np.array([m.phi1, m.a])
    v2 = np.array([m.a, -m.theta1_x])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    x = np.linspace(0.0, p.period, n_samples)
    sol = solution_grid(p, alpha, 0.0, x)
    psi = v[0] * sol[:, 0] + v[1] * sol[:, 2]
    dpsi = v[0] * sol[:, 1] + v[1] * sol[:, 3]
    norm = math.sqrt(_square_norm(p, alpha, v))
    c = 1.0 / norm
    if psi[np.argmax(np.abs(psi))] < 0:
        c = -c
    mass = band.mass(n, side)
    return EdgeEigenfunction(p, n, side, alpha, mass, (c * v[0], c * v[1]), x, c * psi, c * dpsi)


def trace_formula_residual(p: PeriodicPotential, t: float, N: int, band: BandStructure | None = None) -> float:
    """|p(t) - alpha_0^+ - sum_{n<=N} (alpha_n^- + alpha_n^+ - 2 mu_n(t))|."""
    band = band or band_edges(p, N)
    if band.n_max < N:
        raise DomainError(f"band structure holds {band.n_max} gaps, need {N}")
    mu = dirichlet_spectrum(p, t, N, band)
    s = sum(lo + hi - 2.0 * m for (lo, hi), m in zip(band.edges[:N], mu))
    return abs(float(p(t)) - band.alpha0_plus - s)


def _free_phi(z):
    """sin(sqrt z)/sqrt z, entire in z."""
    if z > 0:
        r = math.sqrt(z)
        return math.sin(r) / r
    if z < 0:
        r = math.sqrt(-z)
        return math.sinh(r) / r
    return 1.0


def trubowitz_residual(p: PeriodicPotential, t: float, lam: float, N: int,
                       band: BandStructure | None = None) -> float:
    """Relative gap between phi(1, lam, t) and the tail-corrected Dirichlet product (period 1)."""
    band = band or band_edges(p, N)
    mu = np.array(dirichlet_spectrum(p, t, N, band))
    c0 = p.mean()
    n = np.arange(1, N + 1)
    free = (math.pi * n) ** 2 + c0
    prod = float(np.prod((mu - lam) / (free - lam)))
    approx = prod * _free_phi(lam - c0)
    exact = monodromy(p, lam, t).phi1
    return abs(approx - exact) / abs(exact)
