#!/usr/bin/env python3
"""Loss transparency: inject a single photon loss at various times during a
phase gate and check that recovery restores the logical state."""

import argparse

from _common import report_to_stdout_and_file

from pnd.experiments import loss_transparency_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", default="z_rotation_20",
                        help="drive preset name")
    parser.add_argument("--injections", type=int, default=5,
                        help="number of loss-injection times")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = loss_transparency_experiment(
        preset_name=args.preset,
        n_injections=args.injections,
    )
    report_to_stdout_and_file(report, args.out)


if __name__ == "__main__":
    main()
