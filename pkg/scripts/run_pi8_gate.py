#!/usr/bin/env python3
"""Code-space pi/8 phase gate: abrupt vs smooth envelope, with and without
ancilla relaxation, optionally scanning cavity loss rates."""

import argparse

from _common import report_to_stdout_and_file

from pnd.experiments import pi8_gate_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma-q-khz", type=float, default=3.0,
                        help="ancilla relaxation rate (kHz)")
    parser.add_argument("--kappa-khz", type=float, nargs="*", default=[],
                        help="cavity loss rates to scan (kHz)")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = pi8_gate_experiment(
        gamma_q_khz=args.gamma_q_khz,
        kappa_scan_khz=tuple(args.kappa_khz),
    )
    report_to_stdout_and_file(report, args.out)
    if "kappa_scan" in report.series:
        print("  kappa scan (kHz -> fidelity):")
        for kappa, fid in report.series["kappa_scan"].items():
            print(f"    {kappa}: {fid:.6f}")


if __name__ == "__main__":
    main()
