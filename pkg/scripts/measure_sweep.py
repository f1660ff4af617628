#!/usr/bin/env python3
"""Wave-measure diagnostics on the 2x2 toy across the diffusion strength eta.

For each eta: solve the Riemann problem, build the uncoupled measures, solve
the coupled homogeneous system, fit the sandwich constant, and tabulate the
sup norms of the mixed interaction coefficients over the eps schedule.
"""

import argparse

import numpy as np

from wavefan import analysis as an
from wavefan.bvp import ContinuationSchedule, solve_riemann_diffusive
from wavefan.models import make_diffusion, make_nonconservative_toy


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--etas", type=float, nargs="+", default=[0.01, 0.02, 0.05])
    parser.add_argument(
        "--schedule", type=float, nargs="+", default=[1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
    )
    args = parser.parse_args()

    toy = make_nonconservative_toy(coupling=2.0)
    ul, ur = np.array([0.025, 0.01]), np.array([-0.015, 0.02])
    sched = ContinuationSchedule.from_values(args.schedule)

    print(f"{'eta':>6} {'K (sandwich)':>13} {'sup|phi-phi*|':>14}")
    for eta in args.etas:
        diffusion = make_diffusion("constant", 2, eta=eta)
        sol = solve_riemann_diffusive(toy.system, diffusion, ul, ur, sched)[-1]
        frames = an.profile_frames(toy.system, diffusion, sol)
        coeffs = an.component_coefficients(toy.system, diffusion, sol, frames)
        meas = an.uncoupled_measures(toy.system, diffusion, sol, frames)
        meas = an.linearized_measures(toy.system, diffusion, sol, meas, frames, coeffs)
        print(f"{eta:6.3f} {meas.sandwich_constant:13.4f} {meas.sup_deviation:14.4e}")

    print()
    print("interaction sup norms, eta = 0.05 (rows: eps; columns: triple)")
    diffusion = make_diffusion("constant", 2, eta=0.05)
    sweep = solve_riemann_diffusive(toy.system, diffusion, ul, ur, sched)
    triples = [(1, 2, 2), (2, 1, 1), (1, 1, 2), (2, 2, 1)]
    header = " ".join(f"F{i}{j}{k}".rjust(10) for i, j, k in triples)
    print(f"{'eps':>9} {header}")
    for sol in sweep:
        meas = an.uncoupled_measures(toy.system, diffusion, sol)
        inter = an.interaction_coefficients(toy.system, sol, meas)
        row = " ".join(f"{inter.sup(*t):10.3e}" for t in triples)
        print(f"{sol.epsilon:9.1e} {row}")


if __name__ == "__main__":
    main()
