"""Visibility curves for the ground and satellite presets.

Writes ``<out>/<scenario>.csv`` and ``<out>/<scenario>.dat`` (T, nu columns)
and prints the fitted fringe period next to the redshift estimate. The period
is fitted on a phase-noise-free rerun of the same grid because the detection
phase noise in the satellite preset washes the fringes out to ~0.65 contrast.
"""

import argparse
import math
from pathlib import Path

from clocknet import cli
from clocknet.protocol import fringe_period
from clocknet.spacetime import C

EXPECTED = {
    "ground": 698e-9 * C / (9.80665 * 10.0),
    "satellite": 698e-9 * C / 4.5528e6,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-noise", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for scenario in ("ground", "satellite"):
        overrides = dict(trials=args.trials, seed=args.seed)
        if args.no_noise:
            overrides.update(xi_std=0.0, xi_prime_std=0.0)
        cfg = cli.load_config(scenario=scenario, overrides=overrides)
        records = cli.run(cfg)
        (out / f"{scenario}.csv").write_text(cli.records_csv(records))
        cli.emit_plotdata(records, out / f"{scenario}.dat")
        clean = records if args.no_noise else cli.run(cfg.without_noise())
        period = fringe_period([r.T_s for r in clean], [r.nu_mean for r in clean])
        print(f"{scenario:9s} period {period:.6g} s  (lambda c / dPhi = {EXPECTED[scenario]:.6g} s)  "
              f"nu in [{min(r.nu_mean for r in records):.3f}, {max(r.nu_mean for r in records):.3f}]")
        if math.isnan(period):
            print("  fewer than two minima on this grid")


if __name__ == "__main__":
    main()
