"""Heralding rate versus Bell fidelity as the excitation probability varies."""

import argparse

import numpy as np

from clocknet.emitter import EmitterParams
from clocknet.protocol import ExperimentConfig, run_entanglement


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=0.9, help="eta_d * eta_o * eta_t")
    args = ap.parse_args()
    print(f"{'eps':>6} {'P_s':>9} {'P_s/(eta eps)':>14} {'1-F':>9} {'(1-F)/(2(1-eta)eps)':>20}")
    for eps in np.geomspace(1e-3, 0.3, 12):
        node = EmitterParams(eta_i=1.0, epsilon=float(eps))
        h = run_entanglement(ExperimentConfig(node1=node, node2=node, eta_t=args.eta))
        approx_f = 2 * (1 - args.eta) * eps
        ratio_f = (1 - h.fidelity_to_bell) / approx_f if approx_f > 0 else float("nan")
        print(f"{eps:6.3f} {h.P_s:9.5f} {h.P_s / (args.eta * eps):14.3f} "
              f"{1 - h.fidelity_to_bell:9.5f} {ratio_f:20.3f}")


if __name__ == "__main__":
    main()
