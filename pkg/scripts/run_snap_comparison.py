#!/usr/bin/env python3
"""SNAP comb gate on a displaced state: added infidelity from ancilla
relaxation while the ancilla is transiently excited."""

import argparse

from _common import report_to_stdout_and_file

from pnd.experiments import snap_comparison_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma-q-khz", type=float, default=3.0,
                        help="ancilla relaxation rate (kHz)")
    parser.add_argument("--step-fraction", type=int, default=8000,
                        help="integration steps per gate time")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = snap_comparison_experiment(
        gamma_q_khz=args.gamma_q_khz,
        step_fraction=args.step_fraction,
    )
    report_to_stdout_and_file(report, args.out)


if __name__ == "__main__":
    main()
