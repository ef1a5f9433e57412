"""Periodic potentials: representation, evaluation, shifting and config parsing."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

KINDS = ("constant", "piecewise", "fourier", "samples")

# integer codes shared with the compiled integrator
KIND_CODE = {"constant": 0, "piecewise": 1, "fourier": 2, "samples": 3}


class PotentialError(ValueError):
    """Malformed potential description."""


@dataclass(frozen=True, eq=False)
class PeriodicPotential:
    """Real periodic potential p(x + offset) with one of four representations.

    constant:  value
    piecewise: breakpoints (segment starts, first is 0) and values
    fourier:   coefficients, rows (n, a_n, b_n), p = sum a cos(2 pi n x/T) + b sin(2 pi n x/T)
    samples:   values at x_k = k T / N, periodic cubic interpolation
    """

    kind: str
    period: float = 1.0
    value: float = 0.0
    breakpoints: tuple = ()
    values: tuple = ()
    coefficients: tuple = ()
    samples: tuple = ()
    offset: float = 0.0
    even_hint: bool | None = None
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PotentialError(f"unknown kind {self.kind!r}")
        if not (self.period > 0 and np.isfinite(self.period)):
            raise PotentialError("period must be positive")
        if self.kind == "piecewise":
            bp = np.asarray(self.breakpoints, float)
            vals = np.asarray(self.values, float)
            if len(bp) == len(vals) + 1 and np.isclose(bp[-1], self.period):
                bp = bp[:-1]
                object.__setattr__(self, "breakpoints", tuple(bp))
            if len(bp) == 0 or len(bp) != len(vals):
                raise PotentialError("piecewise: breakpoints and values must have equal length")
            if bp[0] != 0.0:
                raise PotentialError("piecewise: first breakpoint must be 0")
            if np.any(np.diff(bp) <= 0) or bp[-1] >= self.period:
                raise PotentialError("piecewise: breakpoints must be strictly increasing inside [0, period)")
        elif self.kind == "fourier":
            c = np.asarray(self.coefficients, float).reshape(-1, 3)
            if len(c) == 0:
                raise PotentialError("fourier: no coefficients")
            if np.any(c[:, 0] < 0) or np.any(c[:, 0] != np.round(c[:, 0])):
                raise PotentialError("fourier: harmonic indices must be non-negative integers")
        elif self.kind == "samples":
            s = np.asarray(self.samples, float)
            if s.ndim != 1 or len(s) < 4:
                raise PotentialError("samples: need at least 4 values")
            x = np.linspace(0.0, self.period, len(s) + 1)
            spl = CubicSpline(x, np.append(s, s[0]), bc_type="periodic")
            object.__setattr__(self, "_spline", spl)

    # ---- evaluation -------------------------------------------------
    def __call__(self, x):
        return evaluate(self, x)

    @property
    def is_piecewise(self):
        return self.kind in ("constant", "piecewise")

    def segment_table(self):
        """(starts, values) of the unshifted potential over one period."""
        if self.kind == "constant":
            return np.array([0.0]), np.array([self.value])
        if self.kind == "piecewise":
            return np.asarray(self.breakpoints, float), np.asarray(self.values, float)
        raise TypeError("not a piecewise potential")

    def segments(self, t=0.0):
        """Segments (lengths, values) of x -> p(x + t) on [0, period]."""
        T = self.period
        starts, vals = self.segment_table()
        if len(vals) == 1:
            return np.array([T]), vals.copy()
        s0 = (self.offset + t) % T
        # breakpoints of p(x + s0) in x are starts - s0 mod T
        cuts = np.sort(np.unique(np.concatenate([[0.0], (starts - s0) % T])))
        cuts = cuts[cuts < T]
        # drop cuts that sit within rounding of the period end
        cuts = cuts[(T - cuts) > 1e-15 * T]
        edges = np.append(cuts, T)
        lengths = np.diff(edges)
        mids = edges[:-1] + 0.5 * lengths
        keep = lengths > 0
        return lengths[keep], np.asarray(evaluate(self, mids[keep] + t))

    def breakpoints_in_x(self, t=0.0):
        """Discontinuity locations of x -> p(x + t) inside [0, period)."""
        if self.kind != "piecewise":
            return np.array([])
        starts, _ = self.segment_table()
        return np.sort((starts - self.offset - t) % self.period)

    def mean(self):
        T = self.period
        if self.kind == "constant":
            return float(self.value)
        if self.kind == "piecewise":
            L, v = self.segments(0.0)
            return float(np.dot(L, v) / T)
        if self.kind == "fourier":
            c = np.asarray(self.coefficients, float).reshape(-1, 3)
            return float(c[c[:, 0] == 0, 1].sum())
        return float(self._spline.integrate(0.0, T) / T)

    def bounds(self):
        """(min p, max p), exact for piecewise and approximate on a fine grid otherwise."""
        if self.kind == "constant":
            return float(self.value), float(self.value)
        if self.kind == "piecewise":
            v = np.asarray(self.values, float)
            return float(v.min()), float(v.max())
        x = np.linspace(0.0, self.period, 8192, endpoint=False)
        y = evaluate(self, x)
        return float(y.min()), float(y.max())

    def kernel_data(self):
        """Data for the compiled integrator: (code, period, offset, coefficient rows)."""
        code = KIND_CODE[self.kind]
        if self.kind == "fourier":
            c = np.asarray(self.coefficients, float).reshape(-1, 3)
            return code, self.period, self.offset, np.ascontiguousarray(c.T)
        if self.kind == "samples":
            return code, self.period, self.offset, np.ascontiguousarray(self._spline.c)
        raise TypeError("piecewise potentials use exact propagators")


def constant(value, period=1.0):
    return PeriodicPotential("constant", period=period, value=float(value), even_hint=True)


def piecewise(breakpoints, values, period=1.0, even_hint=None):
    return PeriodicPotential("piecewise", period=period, breakpoints=tuple(map(float, breakpoints)),
                             values=tuple(map(float, values)), even_hint=even_hint)


def fourier(coefficients, period=1.0, even_hint=None):
    c = tuple(tuple(map(float, row)) for row in coefficients)
    return PeriodicPotential("fourier", period=period, coefficients=c, even_hint=even_hint)


def sampled(samples, period=1.0, even_hint=None):
    return PeriodicPotential("samples", period=period, samples=tuple(map(float, samples)),
                             even_hint=even_hint)


def kronig_penney(low=0.0, high=10.0, start=0.5, stop=1.0, period=1.0):
    """Two-level potential: `high` on [start, stop), `low` elsewhere."""
    if start <= 0.0:
        bp, vals = [0.0, stop], [high, low]
        if stop >= period:
            return constant(high, period)
    elif stop >= period:
        bp, vals = [0.0, start], [low, high]
    else:
        bp, vals = [0.0, start, stop], [low, high, low]
    return piecewise(bp, vals, period)


def evaluate(p: PeriodicPotential, x):
    """p(x + offset), periodic in x."""
    x = np.asarray(x, float)
    T = p.period
    u = np.mod(x + p.offset, T)
    u = np.where(u >= T, 0.0, u)  # mod can round up to T for tiny negative input
    if p.kind == "constant":
        out = np.full_like(u, p.value)
    elif p.kind == "piecewise":
        starts, vals = p.segment_table()
        idx = np.searchsorted(starts, u, side="right") - 1
        out = vals[np.clip(idx, 0, len(vals) - 1)]
    elif p.kind == "fourier":
        c = np.asarray(p.coefficients, float).reshape(-1, 3)
        arg = 2.0 * np.pi * np.multiply.outer(u, c[:, 0]) / T
        out = np.cos(arg) @ c[:, 1] + np.sin(arg) @ c[:, 2]
    else:
        out = p._spline(u)
    return out if out.ndim else float(out)


def shift(p: PeriodicPotential, t: float) -> PeriodicPotential:
    """Potential x -> p(x + t)."""
    off = (p.offset + t) % p.period
    hint = p.even_hint if off == 0.0 else None
    return replace(p, offset=off, even_hint=hint)


def is_even(p: PeriodicPotential, tol: float = 1e-10) -> bool:
    """Test p(x) = p(period - x) on a 4096-point grid."""
    T = p.period
    x = np.arange(4096) * T / 4096
    # segment boundaries of piecewise data make pointwise comparison ill posed exactly at jumps
    if p.kind == "piecewise":
        x = x + 0.5 * T / 4096
    diff = np.abs(evaluate(p, x) - evaluate(p, T - x))
    return bool(diff.max() <= tol)


# ---- config text ------------------------------------------------------

def potential_from_table(tab: dict, where: str = "potential") -> PeriodicPotential:
    if "kind" not in tab:
        raise PotentialError(f"[{where}] missing key 'kind'")
    kind = tab["kind"]
    extra = set(tab) - {"kind", "period", "even_hint", "value", "breakpoints", "values", "coefficients", "samples"}
    if extra:
        raise PotentialError(f"[{where}] unknown keys {sorted(extra)}")
    period = float(tab.get("period", 1.0))
    hint = tab.get("even_hint")
    try:
        if kind == "constant":
            return PeriodicPotential("constant", period=period, value=float(tab["value"]), even_hint=True)
        if kind == "piecewise":
            return PeriodicPotential("piecewise", period=period,
                                     breakpoints=tuple(map(float, tab["breakpoints"])),
                                     values=tuple(map(float, tab["values"])), even_hint=hint)
        if kind == "fourier":
            rows = tab["coefficients"]
            if any(len(r) != 3 for r in rows):
                raise PotentialError(f"[{where}] coefficients must be [n, a_n, b_n] triples")
            return PeriodicPotential("fourier", period=period,
                                     coefficients=tuple(tuple(map(float, r)) for r in rows), even_hint=hint)
        if kind == "samples":
            return PeriodicPotential("samples", period=period, samples=tuple(map(float, tab["samples"])),
                                     even_hint=hint)
    except KeyError as exc:
        raise PotentialError(f"[{where}] kind={kind} requires key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PotentialError):
            raise PotentialError(f"[{where}] {exc}") from None
        raise PotentialError(f"[{where}] bad value: {exc}") from None
    raise PotentialError(f"[{where}] unknown kind {kind!r}")


def parse_potential(config_text: str, side: str = "right") -> PeriodicPotential:
    """Parse one potential from TOML text with a [potential.left] / [potential.right] section."""
    try:
        doc = tomllib.loads(config_text)
    except tomllib.TOMLDecodeError as exc:
        raise PotentialError(f"config syntax error: {exc}") from None
    pots = doc.get("potential")
    if not isinstance(pots, dict):
        raise PotentialError("missing [potential.*] section")
    if side not in pots:
        if "kind" in pots:
            return potential_from_table(pots, "potential")
        raise PotentialError(f"missing [potential.{side}] section")
    return potential_from_table(pots[side], f"potential.{side}")


def _fmt(x):
    return repr(float(x))


def serialize_potential(p: PeriodicPotential, side: str = "right") -> str:
    """TOML text for p; parse_potential inverts it (offset is folded into the data)."""
    lines = [f"[potential.{side}]", f'kind = "{p.kind}"', f"period = {_fmt(p.period)}"]
    if p.offset != 0.0 and p.kind != "constant":
        if p.kind == "piecewise":
            L, v = p.segments(0.0)
            bp = np.concatenate([[0.0], np.cumsum(L)[:-1]])
            p = piecewise(bp, v, p.period)
        elif p.kind == "fourier":
            c = np.asarray(p.coefficients, float).reshape(-1, 3)
            w = 2 * np.pi * c[:, 0] * p.offset / p.period
            a = c[:, 1] * np.cos(w) + c[:, 2] * np.sin(w)
            b = -c[:, 1] * np.sin(w) + c[:, 2] * np.cos(w)
            p = fourier(np.column_stack([c[:, 0], a, b]), p.period)
        else:
            raise PotentialError("cannot serialize a shifted sampled potential exactly")
    if p.kind == "constant":
        lines.append(f"value = {_fmt(p.value)}")
    elif p.kind == "piecewise":
        lines.append("breakpoints = [" + ", ".join(map(_fmt, p.breakpoints)) + "]")
        lines.append("values = [" + ", ".join(map(_fmt, p.values)) + "]")
    elif p.kind == "fourier":
        rows = ", ".join("[" + ", ".join(map(_fmt, r)) + "]" for r in p.coefficients)
        lines.append(f"coefficients = [{rows}]")
    else:
        lines.append("samples = [" + ", ".join(map(_fmt, p.samples)) + "]")
    if p.even_hint is not None and p.kind != "constant":
        lines.append(f"even_hint = {'true' if p.even_hint else 'false'}")
    return "\n".join(lines) + "\n"
