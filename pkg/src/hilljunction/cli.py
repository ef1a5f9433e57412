"""Command-line front end: bands, junction-scan, dislocation-trace, half-solid-scan, verify."""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import DEFAULTS_VERSION, ConfigError, load_config
from .potential import PotentialError

COLUMNS = {
    "bands": ["side", "n", "alpha_minus", "alpha_plus", "width", "open", "mu", "nu", "mass_minus", "mass_plus"],
    "junction-scan": ["gap_index", "sheet", "lambda", "kind", "residual"],
    "dislocation-trace": ["t", "gap_index", "sheet", "lambda", "kind", "edge_event"],
    "half-solid-scan": ["s", "t", "gap_index", "sheet", "lambda", "kind"],
}


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


def _workers(n_tasks):
    cap = os.environ.get("HJ_THREADS")
    try:
        cap = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, min(cap, n_tasks))


def _pmap(fn, items):
    items = list(items)
    w = _workers(len(items))
    if w <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


# ---- subcommands -----------------------------------------------------------

def _bands_rows(cfg):
    from .spectrum import band_edges
    rows = []
    sides = [("right", cfg.right)] if cfg.left is None else [("left", cfg.left), ("right", cfg.right)]
    for name, p in sides:
        b = band_edges(p, cfg.n_max, tol=cfg.tol, lambda_max=cfg.lambda_max)
        rows.append([name, 0, None, b.alpha0_plus, None, True, None, b.neumann0, None, b.masses[0][1]])
        for g, mu, nu in zip(b.gaps, b.dirichlet, b.neumann):
            mm, mp = b.masses.get(g.n, (None, None))
            rows.append([name, g.n, g.lo, g.hi, g.width, g.open, mu, nu, mm, mp])
    return rows


def _junction_rows(cfg):
    from .junction import Junction, find_gap_states
    j = Junction(cfg.left, cfg.right, cfg.t, cfg.n_max, cfg.lambda_max)
    rows = []
    for g in j.gaps():
        for sheet in (1, 2, 3, 4):
            for r in find_gap_states(j, g, sheet, cfg.grid_points):
                rows.append([g.index, sheet, r.lam, r.kind, r.residual])
    return rows


def _trace_one(args):
    from .dislocation import trace_trajectories
    p, n, grid, band = args
    tr = trace_trajectories(p, n, grid, band)
    events = {(round(t, 12), k) for t, k, _ in tr.edge_events}
    return [[t, n, sh, lam, kind, (round(t, 12), k) in events] for t, lam, sh, kind, k in tr.samples]


def _dislocation_rows(cfg):
    from .spectrum import band_edges
    band = band_edges(cfg.right, cfg.n_max, tol=cfg.tol, lambda_max=cfg.lambda_max)
    gaps = [g.n for g in band.gaps if g.open and (not cfg.gaps or g.n in cfg.gaps)]
    grid = cfg.t_grid()
    parts = _pmap(_trace_one, [(cfg.right, n, grid, band) for n in gaps])
    rows = [r for part in parts for r in part]
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return rows


def _halfsolid_t(args):
    from .halfsolid import HalfSolid
    from .junction import find_gap_states
    s, p, n_max, lmax, t, grid_points = args
    h = HalfSolid(s, p, n_max=n_max, lambda_max=lmax)
    j = h.junction(t)
    out = []
    for g in j.gaps():
        for sheet in (1, 2, 3, 4):
            for r in find_gap_states(j, g, sheet, grid_points):
                out.append([s, t, g.index, sheet, r.lam, r.kind])
    return out


def _halfsolid_rows(cfg):
    grid = cfg.t_grid() if cfg.t_steps > 1 else [cfg.t]
    parts = _pmap(_halfsolid_t, [(cfg.s, cfg.right, cfg.n_max, cfg.lambda_max, float(t), cfg.grid_points)
                                 for t in grid])
    return [r for part in parts for r in part]


def _emit(cmd, rows, cfg, out):
    cols = COLUMNS[cmd]
    if cfg.format == "json":
        meta = {"command": cmd, "config": cfg.echo(), "tolerances": {"root": cfg.tol},
                "defaults_version": DEFAULTS_VERSION}
        recs = [{c: (None if (isinstance(v, float) and not math.isfinite(v)) else
                     (float(v) if isinstance(v, (float, np.floating)) else v)) for c, v in zip(cols, r)}
                for r in rows]
        out.write(json.dumps({"metadata": meta, "records": recs}, indent=1, sort_keys=True, default=str))
        out.write("\n")
        return
    out.write(",".join(cols) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) for v in r) + "\n")


RUNNERS = {"bands": _bands_rows, "junction-scan": _junction_rows, "dislocation-trace": _dislocation_rows,
           "half-solid-scan": _halfsolid_rows}
MODE_OF = {"junction-scan": "junction", "dislocation-trace": "dislocation", "half-solid-scan": "half-solid"}


def build_parser():
    ap = argparse.ArgumentParser(prog="hilljunction", description="Spectra of junctions of periodic potentials.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("bands", "junction-scan", "dislocation-trace", "half-solid-scan", "verify"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--nmax", type=int, default=None)
        sp.add_argument("--lambda-max", type=float, default=None)
        sp.add_argument("--t-steps", type=int, default=None)
        sp.add_argument("--s", type=float, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--output", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default=None)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        cfg = load_config(args.config, n_max=args.nmax, lambda_max=args.lambda_max, t_steps=args.t_steps,
                          s=args.s, tol=args.tol, output=args.output, format=args.format)
        if args.command in MODE_OF and cfg.mode != MODE_OF[args.command]:
            if args.command == "dislocation-trace" or (args.command == "half-solid-scan" and cfg.s is not None):
                cfg.mode = MODE_OF[args.command]
            cfg.validate()
            if cfg.mode != MODE_OF[args.command]:
                raise ConfigError(f"{args.command} needs a config with mode = \"{MODE_OF[args.command]}\"")
    except (ConfigError, PotentialError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    try:
        if args.command == "verify":
            from .verify import report, run_suite
            checks = run_suite(cfg)
            buf.write(report(checks, cfg))
            code = 0 if all(c.passed for c in checks) else 1
        else:
            _emit(args.command, RUNNERS[args.command](cfg), cfg, buf)
            code = 0
    except Exception as exc:  # numerical failures surface as exit 1 with the reason
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
