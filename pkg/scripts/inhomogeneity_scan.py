"""Oracle vs. homogenized formula when the per-site G_l scatter around their mean."""

import argparse

from spinbath.dynamics import default_dt, time_grid
from spinbath.model import ChainSpec, hopping_matrix
from spinbath.oracle import inhomogeneity_deviation, spread_bath
from spinbath.spectra import eigendecompose


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--g", type=float, default=4.0)
    ap.add_argument("--tmax", type=float, default=40.0)
    ap.add_argument("--spreads", type=float, nargs="+", default=[0.0, 0.01, 0.02, 0.05, 0.1, 0.2])
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    chain = ChainSpec.uniform(args.n)
    norm = eigendecompose(hopping_matrix(chain)).norm
    t = time_grid(args.tmax, default_dt(norm, args.g * (1 + max(args.spreads))))
    print("spread  " + "  ".join(f"seed{s}" for s in range(args.seeds)))
    for spread in args.spreads:
        devs = [inhomogeneity_deviation(chain, spread_bath(args.n, args.g, spread, seed=s), t)
                for s in range(args.seeds)]
        print(f"{spread:6.3f}  " + "  ".join(f"{d:.4f}" for d in devs))


if __name__ == "__main__":
    main()
