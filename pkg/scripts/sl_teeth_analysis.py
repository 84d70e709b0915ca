"""SL solution for f = 1 and eps << h: compare u_h with the reduced
solution (odd n) and with I_h u + (h^2/2eps) omega_h (even n), printing
the deviation relative to the reference scale for a range of eps.

The deviation shrinks like eps/h^2, so a fixed relative tolerance only
holds once eps is small enough compared to h^2."""

import argparse
import warnings

import numpy as np

from cdlab.discretize import ProblemSpec1D, solve, solve_reduced_sl
from cdlab.mesh import Mesh1D, ScalarFn, teeth_saw
from cdlab.oracles import exact_const_f


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--odd", type=int, default=99)
    ap.add_argument("--even", type=int, default=100)
    args = ap.parse_args()
    f = ScalarFn.const(1.0)
    mo, me = Mesh1D(args.odd), Mesh1D(args.even)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        U = solve_reduced_sl(mo, f).solution.values
    print("eps        odd: |u-U|/max|U|   even: |u-ref|/amp   4eps/h^2(odd)")
    for eps in (1e-5, 1e-6, 1e-7, 1e-8, 1e-9):
        u = solve(ProblemSpec1D(eps, f, mo, "SL")).values
        odd = np.max(np.abs(u - U)) / np.max(np.abs(U))
        amp = me.h**2 / (2 * eps)
        ue = solve(ProblemSpec1D(eps, f, me, "SL")).values
        ref = exact_const_f(eps, me.interior) + amp * teeth_saw(me).values
        even = np.max(np.abs(ue - ref)) / amp
        print(f"{eps:8.1e}   {odd:14.5g}   {even:16.5g}   {4 * eps / mo.h**2:12.5g}")


if __name__ == "__main__":
    main()
