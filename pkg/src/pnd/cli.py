"""Command-line interface: drive optimization, forward verification, and
experiment simulation, with CSV/JSON artifact outputs.

Config format: one JSON document per run (see README for schemas). Every
output file embeds the config SHA-256 and the tool version; identical configs
reproduce identical numeric payloads.

Exit codes: 0 success, 2 infeasible target, 3 resonance guard, 4 numerical
tolerance breach, 1 all other errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import PropagationConfig, fidelity_trace
from .effective import (
    ResonanceError,
    dephasing_rates,
    micromotion_period,
    qubit_excitation_prob,
    spectrum_order2,
    spectrum_order4,
)
from .models import (
    Abrupt,
    DriveSpec,
    DriveTone,
    NoiseParams,
    RampUpDown,
    SineGate,
    SystemParams,
)
from .optimizer import (
    CPhase,
    Custom,
    InfeasibleTargetError,
    KerrCancel,
    OptimizerConfig,
    Parity,
    ThreePhoton,
    ZRotation,
    make_target,
    optimize_drives,
)
from .qcore import DensityMatrix, HilbertDims, wigner

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_INFEASIBLE = 2
EXIT_RESONANCE = 3
EXIT_TOLERANCE = 4


def _fmt(x) -> str:
    return f"{float(x):.9g}"


def _check_keys(d: dict, allowed: set, context: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown keys in {context}: {sorted(unknown)}")


def _write_csv(path: Path, header: list[str], rows, sha: str) -> None:
    lines = [f"# config_sha256={sha}", f"# version={__version__}",
             ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict, sha: str) -> None:
    payload = dict(payload)
    payload["config_sha256"] = sha
    payload["version"] = __version__
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _system_params(cfg: dict) -> SystemParams:
    _check_keys(cfg, {"chi_mhz", "kerr_khz", "chi_prime_khz", "n_cut"},
                "system")
    return SystemParams(
        chi=float(cfg["chi_mhz"]),
        kerr=float(cfg.get("kerr_khz", 0.0)) * 1e-3,
        chi_prime=float(cfg.get("chi_prime_khz", 0.0)) * 1e-3,
        n_cut=int(cfg.get("n_cut", 6)),
    )


_TARGET_KINDS = {
    "three_photon": (ThreePhoton, {"k3_khz", "n_max"}),
    "parity": (Parity, {"p_khz", "n_max"}),
    "z_rotation": (ZRotation, {"g_khz", "d_n", "n_max"}),
    "kerr_cancel": (KerrCancel, {"k_khz", "n_max"}),
    "cphase": (CPhase, {"g_khz", "d_na", "d_nb", "n_max_a", "n_max_b"}),
}


def _target_spec(cfg: dict):
    kind = cfg.get("kind")
    if kind == "custom":
        _check_keys(cfg, {"kind", "target_khz"}, "target")
        levels = {int(k): float(v) for k, v in cfg["target_khz"].items()}
        if sorted(levels) != list(range(len(levels))):
            raise ValueError("custom target must cover levels 0..N contiguously")
        return Custom(energies_khz=tuple(levels[n] for n in sorted(levels)))
    if kind not in _TARGET_KINDS:
        raise ValueError(f"unknown target kind: {kind!r}")
    cls, allowed = _TARGET_KINDS[kind]
    _check_keys(cfg, allowed | {"kind"}, "target")
    return cls(**{k: v for k, v in cfg.items() if k != "kind"})


def _tones_from_drive(drive: dict, chi: float) -> tuple[DriveTone, ...]:
    return tuple(
        DriveTone(
            m=int(t["m"]),
            omega_amp=(float(t["omega_re_over_chi"])
                       + 1j * float(t.get("omega_im_over_chi", 0.0))) * chi,
            delta=Fraction(int(t["delta_num"]), int(t["delta_den"])),
        )
        for t in drive["tones"]
    )


def _envelope(cfg: dict | None):
    if not cfg:
        return Abrupt()
    kind = cfg.get("kind", "abrupt")
    if kind == "abrupt":
        return Abrupt()
    if kind == "sine":
        return SineGate(T_G=float(cfg["t_gate"]))
    if kind == "ramp":
        return RampUpDown(T_s=float(cfg["t_s"]), t_i=float(cfg.get("t_i", 0.0)),
                          t_f=float(cfg["t_f"]))
    raise ValueError(f"unknown envelope kind: {kind!r}")


def _noise(cfg: dict | None) -> NoiseParams | None:
    if not cfg:
        return None
    _check_keys(cfg, {"gamma_q_khz", "gamma_phi_khz", "kappa_a_khz"}, "noise")
    return NoiseParams(
        gamma_q=float(cfg.get("gamma_q_khz", 0.0)) * 1e-3,
        gamma_phi=float(cfg.get("gamma_phi_khz", 0.0)) * 1e-3,
        kappa_a=float(cfg.get("kappa_a_khz", 0.0)) * 1e-3,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_optimize(cfg: dict, out: Path, sha: str, seed: int | None) -> int:
    _check_keys(cfg, {"system", "target", "optimizer"}, "config")
    params = _system_params(cfg["system"])
    target_spec = _target_spec(cfg["target"])
    opt_cfg_dict = dict(cfg.get("optimizer", {}))
    _check_keys(opt_cfg_dict, {"seed", "n_assignments", "amp_bound",
                               "solver_tol_khz", "include_order4"},
                "optimizer")
    if seed is not None:
        opt_cfg_dict["seed"] = seed
    config = OptimizerConfig(**opt_cfg_dict)
    target = make_target(target_spec)
    if isinstance(next(iter(target.values())), dict):
        raise ValueError(
            "two-cavity targets: optimize each channel marginal separately")
    result = optimize_drives(target, params, config)
    _write_json(out / "drive.json", {
        "chi_MHz": params.chi,
        "kerr_kHz": params.kerr * 1e3,
        "chi_prime_kHz": params.chi_prime * 1e3,
        **result.to_json_dict(),
    }, sha)
    by_m = {t.m: t for t in result.drive.tones}
    rows = []
    for n in sorted(target):
        tone = by_m.get(n)
        rows.append([
            n, target[n], result.achieved.khz()[n],
            float(tone.delta) if tone else 0.0,
            abs(tone.omega_amp) / params.chi if tone else 0.0,
        ])
    _write_csv(out / "spectrum.csv",
               ["n", "E_target_kHz", "E_engineered_kHz", "delta_over_chi",
                "omega_over_chi"], rows, sha)
    return EXIT_OK


def cmd_verify(cfg: dict, out: Path, sha: str) -> int:
    _check_keys(cfg, {"system", "drive", "target_khz", "noise"}, "config")
    params = _system_params(cfg["system"])
    drive = cfg["drive"]
    if isinstance(drive, str):
        drive = json.loads(Path(drive).read_text())
    tones = _tones_from_drive(drive, params.chi)
    target = {int(k): float(v) for k, v in cfg.get("target_khz", {}).items()}
    noise = _noise(cfg.get("noise")) or NoiseParams(gamma_q=3e-3,
                                                    gamma_phi=3e-3)
    e2 = spectrum_order2(params, tones)
    e4 = spectrum_order4(params, tones)
    t_m = micromotion_period(tones, params.chi)
    rows = []
    levels = sorted(e4.energies)
    for n in levels:
        rows.append([
            n, target.get(n, 0.0), e2.khz()[n], e4.khz()[n],
            qubit_excitation_prob(params, tones, n),
        ])
    _write_csv(out / "spectrum.csv",
               ["n", "E_target_kHz", "E_order2_kHz", "E_order4_kHz", "p_e"],
               rows, sha)
    rates = dephasing_rates(params, tones, noise)
    _write_csv(out / "dephasing.csv", ["n1", "n2", "gamma_kHz"],
               [[n1, n2, g * 1e3] for (n1, n2), g in sorted(rates.gamma.items())],
               sha)
    residual = float(max(abs(e4.khz()[n] - target[n]) for n in target)) \
        if target else 0.0
    _write_json(out / "report.json", {
        "micromotion_period_us": t_m,
        "max_residual_khz": residual,
        "within_tolerance": bool(residual <= 0.5),
    }, sha)
    return EXIT_OK if residual <= 0.5 else EXIT_TOLERANCE


def _simulate_kerr_wigner(out: Path, sha: str, cfg: dict) -> None:
    from .experiments import kerr_cancel_experiment  # noqa: F401  (doc link)
    from .codes import kitten_plus  # noqa: F401
    from .dynamics import drive_hamiltonian_factory, propagate_state
    from .models import cavity_qubit_dims
    from .presets import PRESETS
    from .qcore import cat_state, partial_trace

    preset = PRESETS["kerr_cancel"]
    params = preset.system_params()
    times = [float(t) for t in cfg.get("wigner_times", [0.0, 20.0])]
    grid = np.linspace(-3.0, 3.0, int(cfg.get("wigner_points", 41)))
    psi0 = cat_state(np.sqrt(2.0), "even", params.n_cut,
                     leak_tol=1e-2).amplitudes
    dims = cavity_qubit_dims(params.n_cut)
    psi = np.zeros(dims.total_dim, dtype=complex)
    psi[0::2] = psi0
    t_m = micromotion_period(preset.tones(), preset.chi)
    h_of_t = drive_hamiltonian_factory(params, preset.drive_spec(Abrupt()))
    config = PropagationConfig(t_span=(0.0, max(times) or t_m), step=t_m / 2000,
                               record_times=tuple(times))
    ts, states = propagate_state(h_of_t, psi, config)
    for k, t in enumerate(times):
        idx = int(np.argmin(np.abs(np.asarray(ts) - t)))
        s = states[idx]
        rho = partial_trace(
            DensityMatrix(dims, np.outer(s, s.conj())), ["cavity"])
        w = wigner(rho, grid, grid)
        rows = [[x, p, w[i, j]] for i, x in enumerate(grid)
                for j, p in enumerate(grid)]
        _write_csv(out / f"wigner_t{k}.csv", ["x", "p", "W"], rows, sha)


def cmd_simulate(cfg: dict, out: Path, sha: str) -> int:
    from . import experiments as ex
    from .presets import PRESETS

    _check_keys(cfg, {"experiment", "noise", "wigner_times", "wigner_points",
                      "drive", "system", "target_khz", "psi0", "t_gate",
                      "envelope", "step_us", "record_every_us"}, "config")
    name = cfg.get("experiment")
    scalars: dict = {}
    series_rows: list = []
    series_header = ["time_us", "fidelity"]
    if name == "pi8":
        report = ex.pi8_gate_experiment()
        scalars = dict(report.scalars)
        # Fidelity trace for the smooth envelope, for plotting.
        preset = PRESETS["z_rotation_20"]
        params = preset.system_params()
        t_m = micromotion_period(preset.tones(), preset.chi)
        t_gate = 2 * t_m
        spec = preset.drive_spec(SineGate(t_gate))
        record = tuple(np.linspace(0.0, t_gate, 101))
        from .codes import kitten_plus
        times, fids = fidelity_trace(
            params, spec,
            {n: preset.target_khz[n] for n in range(preset.n_levels)},
            kitten_plus(params.n_cut).amplitudes, None,
            PropagationConfig(t_span=(0.0, t_gate), step=t_m / 2000,
                              record_times=record))
        series_header = ["time_us", "fidelity", "lambda_t"]
        from .models import envelope_value
        series_rows = [[t, f, envelope_value(spec.envelope, t)]
                       for t, f in zip(times, fids)]
    elif name == "theta_scan":
        report = ex.theta_scaling_experiment()
        scalars = dict(report.scalars)
        series_header = ["theta", "infidelity"]
        series_rows = sorted(report.series["theta_infidelity"].items())
    elif name == "tg_scan":
        report = ex.theta_scaling_experiment()
        scalars = dict(report.scalars)
        series_header = ["tg_factor", "infidelity"]
        series_rows = sorted(report.series["tg_infidelity"].items())
    elif name == "kerr_cancel":
        report = ex.kerr_cancel_experiment()
        scalars = dict(report.scalars)
        times, fids = report.series["fidelity_abrupt"]
        series_rows = list(zip(times, fids))
        _simulate_kerr_wigner(out, sha, cfg)
    elif name == "cphase":
        report = ex.cphase_experiment()
        scalars = dict(report.scalars)
        series_rows = []
    elif name == "custom":
        params = _system_params(cfg["system"])
        drive = cfg["drive"]
        if isinstance(drive, str):
            drive = json.loads(Path(drive).read_text())
        tones = _tones_from_drive(drive, params.chi)
        spec = DriveSpec(tones=tones, envelope=_envelope(cfg.get("envelope")))
        target = {int(k): float(v)
                  for k, v in cfg.get("target_khz", {}).items()}
        psi0 = np.array([complex(v) for v in cfg["psi0"]])
        t_gate = float(cfg["t_gate"])
        step = float(cfg.get("step_us", t_gate / 20000))
        every = float(cfg.get("record_every_us", t_gate / 100))
        record = tuple(np.arange(0.0, t_gate + 1e-12, every))
        times, fids = fidelity_trace(
            params, spec, target, psi0, _noise(cfg.get("noise")),
            PropagationConfig(t_span=(0.0, t_gate), step=step,
                              record_times=record))
        scalars = {"final_fidelity": float(fids[-1])}
        series_rows = list(zip(times, fids))
        report = None
    else:
        raise ValueError(f"unknown experiment: {name!r}")

    payload = {"experiment": name, "scalars": scalars}
    if report is not None:
        payload["provenance"] = report.provenance
        payload["inputs"] = report.inputs
    _write_json(out / "report.json", payload, sha)
    _write_csv(out / "series.csv", series_header, series_rows, sha)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pnd",
        description="Engineered photon-number-dependent cavity spectra: "
                    "drive design, verification, and simulation.",
    )
    parser.add_argument("command", choices=["optimize", "verify", "simulate"])
    parser.add_argument("--config", required=True, help="JSON run config")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override optimizer seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker parallelism bound (results are "
                             "deterministic regardless)")
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_OTHER
    try:
        raw = Path(args.config).read_bytes()
        sha = hashlib.sha256(raw).hexdigest()
        cfg = json.loads(raw)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "optimize":
            return cmd_optimize(cfg, out, sha, args.seed)
        if args.command == "verify":
            return cmd_verify(cfg, out, sha)
        return cmd_simulate(cfg, out, sha)
    except InfeasibleTargetError as exc:
        print(f"infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResonanceError as exc:
        print(f"resonance guard: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except RuntimeError as exc:
        print(f"tolerance breach: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except Exception as exc:  # argparse errors exit on their own
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
