"""Sweep the constant level s across the ground-state threshold alpha_0^+ + m^+(alpha_0^+)^2."""
import argparse

import numpy as np

from hilljunction.halfsolid import HalfSolid, ground_state_prediction, hs_counts
from hilljunction.potential import kronig_penney, shift


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shift", type=float, default=0.75)
    args = ap.parse_args()
    p = shift(kronig_penney(start=0.25, stop=0.75), args.shift)
    gp = ground_state_prediction(HalfSolid(6.0, p, n_max=2))
    thr = gp["threshold"]
    print(f"m+ = {gp['m_plus']:.12g}, nu0 = {gp['nu0']:.12g}, threshold = {thr:.12g}")
    for ds in np.concatenate([-np.geomspace(1e-1, 1e-7, 7), np.geomspace(1e-7, 1e-1, 7)]):
        row = hs_counts(HalfSolid(float(thr + ds), p, n_max=2))["rows"][0]
        print(f"  s - threshold = {ds:+.1e}: sheet 1 {row['sheet1']}, sheet 4 {row['sheet4']}, "
              f"predicted {row['predicted']}")


if __name__ == "__main__":
    main()
