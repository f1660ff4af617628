#!/usr/bin/env python3
"""Convergence of viscous Burgers profiles to the exact Riemann solution.

Prints an L1/Linf error table over the epsilon schedule for shock and
rarefaction data; optionally dumps a PNG of the profiles if matplotlib is
available.
"""

import argparse

import numpy as np

from wavefan.analysis import l1_to_oracle, linf_to_oracle, total_variation
from wavefan.bvp import ContinuationSchedule, solve_riemann_diffusive
from wavefan.models import make_burgers


def run(data, schedule, plot=None):
    model = make_burgers()
    u_l, u_r = [data[0]], [data[1]]
    fan = model.exact_riemann(u_l, u_r)
    sweep = solve_riemann_diffusive(
        model.system, model.diffusion, u_l, u_r,
        ContinuationSchedule.from_values(schedule),
    )
    print(f"data: u_l={data[0]:+.2f} u_r={data[1]:+.2f}")
    print(f"{'eps':>9} {'nodes':>7} {'L1':>12} {'Linf':>12} {'TV':>10}")
    for sol in sweep:
        print(
            f"{sol.epsilon:9.1e} {sol.mesh.n_nodes:7d} "
            f"{l1_to_oracle(sol, fan):12.4e} {linf_to_oracle(sol, fan):12.4e} "
            f"{total_variation(sol):10.6f}"
        )
    if plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 4))
        for sol in sweep:
            ax.plot(sol.mesh.nodes, sol.states[:, 0], lw=1, label=f"eps={sol.epsilon:g}")
        y = np.linspace(-1, 1, 1001)
        ax.plot(y, fan(y)[:, 0], "k--", lw=1, label="exact")
        ax.set_xlabel("y = x/t")
        ax.set_ylabel("u")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(plot, dpi=150)
        print(f"wrote {plot}")
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--plot", default=None, help="optional PNG path")
    parser.add_argument(
        "--schedule",
        type=float,
        nargs="+",
        default=[1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
    )
    args = parser.parse_args()
    run((0.2, -0.2), args.schedule, args.plot)
    run((-0.2, 0.2), args.schedule)


if __name__ == "__main__":
    main()
