"""Compare the even-junction sign rule with direct sheet-1 counts over pairs of even potentials."""
import argparse
import itertools
import time

from hilljunction.junction import Junction, count_predict_even, find_gap_states
from hilljunction.potential import fourier, piecewise

POTENTIALS = {
    "bar10": piecewise([0, .25, .75], [0, 10, 0], even_hint=True),
    "well6": piecewise([0, .25, .75], [6, 0, 6], even_hint=True),
    "bar4": piecewise([0, .25, .75], [0, 4, 0], even_hint=True),
    "cos2": fourier([(1, 2.0, 0.0)], even_hint=True),
    "mcos3": fourier([(1, -3.0, 0.0)], even_hint=True),
    "mix": fourier([(1, 2.0, 0.0), (2, -1.5, 0.0)], even_hint=True),
}


def sign(x):
    if x is None:
        return "inf"
    return "+" if x > 1e-9 else ("-" if x < -1e-9 else "0")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=3)
    args = ap.parse_args()
    t0 = time.time()
    mism = 0
    print("left   right  gap n1 n2 d1  d2  predicted found")
    for a, b in itertools.permutations(POTENTIALS, 2):
        j = Junction(POTENTIALS[a], POTENTIALS[b], 0.0, args.nmax)
        for g in j.gaps():
            pred = count_predict_even(j, g)
            n = len([r for r in find_gap_states(j, g, 1) if not r.borderline])
            d1 = None if g.n1 == 0 else j.left.band.dirichlet[g.n1 - 1] - j.left.band.neumann[g.n1 - 1]
            d2 = None if g.n2 == 0 else j.right.band.dirichlet[g.n2 - 1] - j.right.band.neumann[g.n2 - 1]
            bad = pred != "indeterminate" and pred != n
            mism += bad
            print(f"{a:6s} {b:6s} {g.index:3d} {g.n1:2d} {g.n2:2d} {sign(d1):3s} {sign(d2):3s} "
                  f"{str(pred):9s} {n}{'  MISMATCH' if bad else ''}")
    print(f"{mism} mismatches, {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
