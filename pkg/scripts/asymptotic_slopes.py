"""Log-log slopes of the small-shift edge asymptotics for dislocations and half-solids."""
import argparse

import numpy as np

from hilljunction.dislocation import DislocationGap, edge_asymptote, traced_z
from hilljunction.halfsolid import HalfSolid, hs_edge_asymptote, hs_matching_roots, scanned_z
from hilljunction.potential import kronig_penney, piecewise
from hilljunction.spectrum import band_edges


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=7)
    args = ap.parse_args()
    ts = np.geomspace(1e-3, 1e-1, args.points)
    print("dislocation edges")
    for name, p in (("kp", kronig_penney()), ("centred", kronig_penney(start=0.25, stop=0.75))):
        band = band_edges(p, 2)
        for n in (1, 2):
            dg = DislocationGap(p, n, band)
            for side in (-1, 1):
                ea = edge_asymptote(p, n, side, band)
                errs = [abs(traced_z(dg, float(t), side) - ea.z(float(t))) for t in ts]
                sl = np.polyfit(np.log(ts), np.log(errs), 1)[0]
                print(f"  {name:8s} gap {n} side {side:+d} {'degenerate' if ea.degenerate else 'generic   '} "
                      f"slope {sl:.3f}  err(1e-2)={errs[len(ts) // 2]:.2e}")
    print("half-solid edges, s = 30, even barrier")
    h = HalfSolid(30.0, piecewise([0, .25, .75], [0, 10, 0], even_hint=True), n_max=3)
    g = h.band.gap(1)
    for side in (-1, 1):
        alpha = g.lo if side < 0 else g.hi
        for y in hs_matching_roots(h, 1, side):
            errs = [abs(scanned_z(h, y + float(t), alpha, side)[0] - hs_edge_asymptote(h, 1, side, y, float(t)).z)
                    for t in ts]
            sl = np.polyfit(np.log(ts), np.log(errs), 1)[0]
            print(f"  side {side:+d} y={y:.6f} slope {sl:.3f}")


if __name__ == "__main__":
    main()
