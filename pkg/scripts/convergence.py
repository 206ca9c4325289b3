#!/usr/bin/env python3
"""Grid refinement of the bound-state threshold for one (eps, l_T) cell.

    python3 scripts/convergence.py --eps 0.1 --lt 0.1 --n 50 100 200 [--order 2]

Prints a_dd_min, x_bar and tau for each grid, plus the observed order
from the last three a_dd_min values when three or more grids are given.
Bisection runs to rel_tol 1e-4 here so it does not hide the grid error.
"""

import argparse
import math

from darkbarrier import fields as F
from darkbarrier import solver as S
from darkbarrier.core import reduced_to_si, si_to_reduced, yb171


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--lt", type=float, default=0.1, help="l_T in units of sqrt(eps) lambda")
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--order", type=int, default=2)
    args = ap.parse_args(argv)

    sp = yb171()
    omega0 = si_to_reduced(2 * math.pi * 100e6, "frequency", sp)
    gamma = si_to_reduced(sp.gamma, "frequency", sp)
    profile = F.double_barrier(args.eps, 0.0, omega0=omega0)
    l_t = args.lt * math.sqrt(args.eps) * 2 * math.pi
    values = []
    print(f"{'n':>5} {'a_min/(sqrt(eps) lam)':>22} {'x_bar':>10} {'tau [s]':>10}")
    for n in args.n:
        problem = S.BoundProblem(profile, l_t, S.SolverSettings(n=n, order=args.order, rel_tol=1e-4))
        th = S.add_min_bisect(problem)
        res = S.bound_state_result(problem, th.state, th.a_dd_min, gamma)
        a = th.a_dd_min / (math.sqrt(args.eps) * 2 * math.pi)
        values.append(a)
        print(f"{n:>5} {a:>22.6f} {res.x_bar:>10.5f} {reduced_to_si(res.tau, 'time', sp):>10.4g}")
    if len(values) >= 3:
        a1, a2, a3 = values[-3:]
        if (a2 - a3) != 0 and (a1 - a2) / (a2 - a3) > 0:
            print(f"observed order {math.log2((a1 - a2) / (a2 - a3)):.2f} (grids assumed to double)")


if __name__ == "__main__":
    main()
