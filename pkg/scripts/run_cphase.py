#!/usr/bin/env python3
"""Two-cavity controlled-phase gate between kitten-encoded logical qubits,
with and without ancilla relaxation."""

import argparse

from _common import report_to_stdout_and_file

from pnd.experiments import cphase_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma-q-khz", type=float, default=3.0,
                        help="ancilla relaxation rate (kHz)")
    parser.add_argument("--kappa-khz", type=float, nargs="*", default=[],
                        help="cavity loss rates to scan (kHz)")
    parser.add_argument("--step-fraction", type=int, default=1600,
                        help="integration steps per gate time")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = cphase_experiment(
        gamma_q_khz=args.gamma_q_khz,
        kappa_scan_khz=tuple(args.kappa_khz),
        step_fraction=args.step_fraction,
    )
    report_to_stdout_and_file(report, args.out)
    if "kappa_scan" in report.series:
        print("  kappa scan (kHz -> fidelity):")
        for kappa, fid in report.series["kappa_scan"].items():
            print(f"    {kappa}: {fid:.6f}")


if __name__ == "__main__":
    main()
