"""Teeth amplitude of the x_{n-2} section of the 2D UPG solution (f = 1)
over a sweep of eps = c h^2, next to a fine-grid reference sampled on the
same nodes.  Shows where the detector stops seeing the resolved parabolic
layer and what part of the amplitude is spurious."""

import argparse

import numpy as np

from cdlab.norms import oscillation_report
from cdlab.upg2d import assemble_2d, section, solve_2d_fast


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--refine", type=int, default=16, help="fine grid = refine * n")
    args = ap.parse_args()
    n, k = args.n, args.refine
    h = 1.0 / n
    print("eps/h^2      teeth(UPG)   teeth(ref)   sign_changes(UPG)")
    for c in (1e-3, 1e-2, 0.1, 1, 4, 16, 64, 256):
        eps = c * h * h
        u = solve_2d_fast(assemble_2d(eps, n, 1.0))
        r = oscillation_report(section(u, n - 2))
        fine = solve_2d_fast(assemble_2d(eps, n * k, 1.0)).grid
        ref = fine[k - 1 :: k, (n - 2) * k - 1][: n - 1]
        rr = oscillation_report(ref)
        print(f"{c:9.3g}  {r.teeth_amplitude:11.4g}  {rr.teeth_amplitude:11.4g}  {r.sign_changes:6d}")


if __name__ == "__main__":
    main()
