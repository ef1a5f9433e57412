"""Run configuration: TOML file plus command-line overrides."""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .potential import PeriodicPotential, PotentialError, potential_from_table

MODES = ("bands", "junction", "dislocation", "half-solid")
DEFAULTS_VERSION = "1"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "bands"
    right: PeriodicPotential | None = None
    left: PeriodicPotential | None = None
    n_max: int = 8
    lambda_max: float | None = None
    t: float = 0.0
    t_start: float = 0.0
    t_stop: float = 2.0
    t_steps: int = 201
    s: float | None = None
    tol: float = 1e-9
    grid_points: int = 400
    seed: int = 0
    gaps: list = field(default_factory=list)
    output: str | None = None
    format: str = "csv"
    source: str = ""

    def t_grid(self):
        import numpy as np
        return np.linspace(self.t_start, self.t_stop, self.t_steps)

    def echo(self) -> dict:
        """Plain-data view for output metadata (potentials as tables)."""
        d = {k: v for k, v in asdict(self).items() if k not in ("left", "right", "source")}
        for side in ("left", "right"):
            p = getattr(self, side)
            if p is not None:
                d[side] = {"kind": p.kind, "period": p.period, "value": p.value, "breakpoints": list(p.breakpoints or ()),
                           "values": list(p.values or ()),
                           "coefficients": [list(r) for r in (p.coefficients or ())],
                           "samples": list(p.samples or ())}
        return d

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.right is None:
            raise ConfigError("a [potential] (or [potential.right]) section is required")
        if self.mode == "junction" and self.left is None:
            raise ConfigError("mode 'junction' needs [potential.left]")
        if self.mode == "half-solid" and self.s is None:
            raise ConfigError("mode 'half-solid' needs the level s")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.t_steps < 2:
            raise ConfigError("t_steps must be >= 2")
        if not self.tol > 0:
            raise ConfigError("tolerances must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        return self


def _potentials(doc):
    pots = doc.get("potential")
    if pots is None:
        return None, None
    if not isinstance(pots, dict):
        raise ConfigError("[potential] must be a table")
    try:
        if "kind" in pots:
            return None, potential_from_table(pots, "potential")
        left = potential_from_table(pots["left"], "potential.left") if "left" in pots else None
        right = potential_from_table(pots["right"], "potential.right") if "right" in pots else None
    except PotentialError as exc:
        raise ConfigError(str(exc)) from None
    return left, right


def config_from_text(text: str, source: str = "<string>") -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    left, right = _potentials(doc)
    cfg = RunConfig(left=left, right=right, source=source)
    known = {"mode", "n_max", "lambda_max", "t", "s", "seed", "gaps", "potential", "t_grid", "tolerances",
             "output", "grid_points"}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"{source}: unknown keys {sorted(extra)}")
    try:
        cfg.mode = str(doc.get("mode", cfg.mode))
        cfg.n_max = int(doc.get("n_max", cfg.n_max))
        if "lambda_max" in doc:
            cfg.lambda_max = float(doc["lambda_max"])
        cfg.t = float(doc.get("t", cfg.t))
        if "s" in doc:
            cfg.s = float(doc["s"])
        cfg.seed = int(doc.get("seed", cfg.seed))
        cfg.gaps = [int(g) for g in doc.get("gaps", [])]
        cfg.grid_points = int(doc.get("grid_points", cfg.grid_points))
        tg = doc.get("t_grid", {})
        cfg.t_start = float(tg.get("start", cfg.t_start))
        cfg.t_stop = float(tg.get("stop", cfg.t_stop))
        cfg.t_steps = int(tg.get("steps", cfg.t_steps))
        cfg.tol = float(doc.get("tolerances", {}).get("root", cfg.tol))
        out = doc.get("output", {})
        cfg.output = out.get("path")
        cfg.format = out.get("format", cfg.format)
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def load_config(path: str, **overrides) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cfg = config_from_text(text, path)
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    return cfg.validate()
