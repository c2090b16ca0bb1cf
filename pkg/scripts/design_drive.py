#!/usr/bin/env python3
"""Design a drive from scratch: pick detunings and solve for tone amplitudes
that engineer a requested cavity spectrum, then print the result."""

import argparse
import json

from pnd.models import SystemParams
from pnd.optimizer import (
    KerrCancel,
    OptimizerConfig,
    Parity,
    ThreePhoton,
    ZRotation,
    make_target,
    optimize_drives,
)


def build_target(args: argparse.Namespace):
    if args.kind == "three_photon":
        return ThreePhoton(k3_khz=args.strength, n_max=args.n_max)
    if args.kind == "parity":
        return Parity(p_khz=args.strength, n_max=args.n_max)
    if args.kind == "z_rotation":
        return ZRotation(g_khz=args.strength, n_max=args.n_max)
    if args.kind == "kerr_cancel":
        return KerrCancel(k_khz=args.strength, n_max=args.n_max)
    raise ValueError(args.kind)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("kind", choices=["three_photon", "parity",
                                         "z_rotation", "kerr_cancel"])
    parser.add_argument("strength", type=float,
                        help="target strength (kHz)")
    parser.add_argument("--chi", type=float, default=2.0,
                        help="dispersive shift (MHz)")
    parser.add_argument("--kerr-khz", type=float, default=0.0,
                        help="bare cavity self-Kerr (kHz)")
    parser.add_argument("--n-max", type=int, default=6,
                        help="highest cavity level to control")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="write drive JSON here")
    args = parser.parse_args()

    params = SystemParams(chi=args.chi, kerr=args.kerr_khz * 1e-3)
    target = make_target(build_target(args))
    config = OptimizerConfig(seed=args.seed)
    drive = optimize_drives(target, params, config)

    print(f"objective (sum of ancilla excitation): {drive.objective:.6g}")
    print(f"max residual: {drive.residual_khz:.4g} kHz")
    print("tones (m, delta/chi, |omega|/chi):")
    for tone in drive.drive.tones:
        print(f"  m={tone.m:2d}  delta={float(tone.delta):+.4f}"
              f"  omega={abs(tone.omega_amp) / params.chi:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(drive.to_json_dict(), fh, indent=2)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
