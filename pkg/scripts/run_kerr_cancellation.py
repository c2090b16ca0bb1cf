#!/usr/bin/env python3
"""Kerr cancellation on a coherent state: hold fidelity against self-Kerr
collapse with an always-on drive, abrupt vs ramped envelope."""

import argparse
import math

from _common import report_to_stdout_and_file

from pnd.experiments import kerr_cancel_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--duration", type=float, default=100.0,
                        help="hold time (us)")
    parser.add_argument("--ramp-ts", type=float, default=2.5,
                        help="envelope ramp time (us)")
    parser.add_argument("--gamma-q-khz", type=float, default=3.0,
                        help="ancilla relaxation rate (kHz)")
    parser.add_argument("--alpha", type=float, default=math.sqrt(2.0),
                        help="coherent-state amplitude")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = kerr_cancel_experiment(
        duration=args.duration,
        ramp_ts=args.ramp_ts,
        gamma_q_khz=args.gamma_q_khz,
        alpha_c=args.alpha,
    )
    report_to_stdout_and_file(report, args.out)


if __name__ == "__main__":
    main()
