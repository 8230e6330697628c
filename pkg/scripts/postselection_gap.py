"""Entangled versus product-state (post-selected) visibility under device noise.

For each transmission the script prints nu, nu_ps and lambda = nu_ps - nu at a
few free-evolution times of the ground geometry.
"""

import argparse

import numpy as np

from clocknet import cli
from clocknet.protocol import visibility_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--times", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0])
    args = ap.parse_args()
    print(f"{'eta_t':>6} {'T':>5} {'nu':>8} {'nu_ps':>8} {'lambda':>9} {'p_select':>9}")
    for eta_t in (1.0, 0.9, 0.5, 0.1):
        cfg = cli.load_config(scenario="ground", overrides=dict(
            eta_t=eta_t, trials=args.trials, times=list(args.times)))
        for pt in visibility_curve(cfg, postselected=True):
            print(f"{eta_t:6.2f} {pt.T:5.2f} {pt.nu:8.4f} {pt.nu_ps:8.4f} {pt.lambda_gap:9.4f} {pt.p_select:9.4f}")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
