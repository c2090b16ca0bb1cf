#!/usr/bin/env python3
"""Stroboscopic micromotion: fidelity revivals at the common drive period and
the quadratic scaling of the excursion depth with drive amplitude."""

import argparse

from _common import report_to_stdout_and_file

from pnd.experiments import micromotion_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", default="z_rotation_20",
                        help="drive preset name")
    parser.add_argument("--amp-scales", type=float, nargs="*",
                        default=[1.0, 0.5, 0.25],
                        help="amplitude scale factors")
    parser.add_argument("--periods", type=float, default=4.0,
                        help="number of micromotion periods to simulate")
    parser.add_argument("--out", help="write report JSON here")
    args = parser.parse_args()

    report = micromotion_experiment(
        preset_name=args.preset,
        amp_scales=tuple(args.amp_scales),
        periods=args.periods,
    )
    report_to_stdout_and_file(report, args.out)


if __name__ == "__main__":
    main()
