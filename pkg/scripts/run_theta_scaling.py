#!/usr/bin/env python3
"""Phase-gate infidelity vs rotation angle theta and gate time: checks the
linear scaling of relaxation-induced infidelity with accumulated phase."""

import argparse
import math

from _common import report_to_stdout_and_file

from pnd.experiments import theta_scaling_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma-khz", type=float, default=3.0,
                        help="ancilla relaxation rate (kHz)")
    parser.add_argument("--thetas", type=float, nargs="*",
                        default=[math.pi / 2, math.pi, 3 * math.pi / 2,
                                 2 * math.pi],
                        help="rotation angles (rad)")
    parser.add_argument("--tg-factors", type=float, nargs="*",
                        default=[1.0, 2.0, 4.0],
                        help="gate-time multipliers at fixed theta")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = theta_scaling_experiment(
        thetas=tuple(args.thetas),
        tg_factors=tuple(args.tg_factors),
        gamma_khz=args.gamma_khz,
    )
    report_to_stdout_and_file(report, args.out)


if __name__ == "__main__":
    main()
