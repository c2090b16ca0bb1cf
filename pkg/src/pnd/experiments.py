"""Named experiments: phase gates on code states, envelope comparisons,
rotation-angle scalings, Kerr cancellation, and the two-cavity phase gate.

Each experiment returns an ExperimentReport bundling scalar results and any
time series, with a provenance hash of its inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .codes import kitten_plus, kitten_recovery, recovery_kraus
from .dynamics import (
    JumpSet,
    PropagationConfig,
    cavity_qubit_jumps,
    drive_hamiltonian_factory,
    propagate_lindblad,
    propagate_state,
    two_cavity_drive_factory,
    two_cavity_jumps,
)
from .effective import micromotion_period, two_cavity_spectrum
from .models import (
    TWO_PI,
    Abrupt,
    DriveSpec,
    DriveTone,
    NoiseParams,
    RampUpDown,
    SineGate,
    SystemParams,
    TwoCavityParams,
    cavity_qubit_dims,
    two_cavity_dims,
)
from .presets import PRESETS, DrivePreset, cphase_two_cavity_params
from .qcore import (
    DensityMatrix,
    HilbertDims,
    QuantumState,
    cat_state,
    partial_trace,
    state_fidelity,
)

__all__ = [
    "ExperimentReport",
    "pi8_gate_experiment",
    "snap_gate",
    "snap_comparison_experiment",
    "theta_scaling_experiment",
    "kerr_cancel_experiment",
    "micromotion_experiment",
    "cphase_experiment",
    "loss_transparency_experiment",
]

DEFAULT_STEP_FRACTION = 2000  # steps per micromotion period


def _amplitude_fidelity(prob: float) -> float:
    """Non-squared (amplitude) fidelity from a probability overlap.

    Experiments report sqrt(<psi_T|rho|psi_T>), the Uhlmann fidelity for a
    pure target, which is the convention behind the tabulated gate numbers.
    """
    return math.sqrt(max(prob, 0.0))


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    inputs: dict
    scalars: dict
    series: dict = field(default_factory=dict)

    @property
    def provenance(self) -> str:
        payload = json.dumps(self.inputs, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Shared gate-run machinery (single cavity)
# ---------------------------------------------------------------------------

def _target_state(psi0_cavity: np.ndarray, target_khz: dict, t: float) -> np.ndarray:
    levels = sorted(target_khz)
    phases = np.exp(-1j * TWO_PI * np.array([target_khz[n] for n in levels])
                    * 1e-3 * t)
    return psi0_cavity * phases


def _final_cavity_state(
    params: SystemParams,
    h_of_t,
    psi0_cavity: np.ndarray,
    noise: NoiseParams | None,
    t_gate: float,
    step: float,
) -> DensityMatrix:
    dims = cavity_qubit_dims(params.n_cut)
    dim = dims.total_dim
    psi0 = np.zeros(dim, dtype=complex)
    psi0[0::2] = psi0_cavity
    config = PropagationConfig(t_span=(0.0, t_gate), step=step)
    if noise is None:
        _, states = propagate_state(h_of_t, psi0, config)
        rho = np.outer(states[-1], states[-1].conj())
    else:
        jumps = cavity_qubit_jumps(params, noise)
        rho0 = np.outer(psi0, psi0.conj())
        _, rhos = propagate_lindblad(h_of_t, rho0, jumps, config)
        rho = rhos[-1]
    return partial_trace(DensityMatrix(dims, rho), ["cavity"])


def _gate_fidelity(
    params: SystemParams,
    h_of_t,
    psi0_cavity: np.ndarray,
    target_cavity: np.ndarray,
    noise: NoiseParams | None,
    t_gate: float,
    step: float,
    recover: bool = True,
) -> float:
    cav = _final_cavity_state(params, h_of_t, psi0_cavity, noise, t_gate, step)
    if recover:
        cav = kitten_recovery(cav)
    target = QuantumState(cav.dims, target_cavity)
    return _amplitude_fidelity(state_fidelity(cav, target))


# ---------------------------------------------------------------------------
# Phase gate on the code space
# ---------------------------------------------------------------------------

def pi8_gate_experiment(
    preset_name: str = "z_rotation_20",
    gamma_q_khz: float = 3.0,
    kappa_scan_khz: tuple[float, ...] = (),
    step_fraction: int = DEFAULT_STEP_FRACTION,
) -> ExperimentReport:
    """Code-space phase gate from an engineered parity-block spectrum.

    Runs abrupt and smooth-sine envelopes over one gate time (two micromotion
    periods), with and without ancilla relaxation, applying photon-loss
    recovery before scoring against the target-evolved state.
    """
    preset = PRESETS[preset_name]
    params = preset.system_params()
    t_m = micromotion_period(preset.tones(), preset.chi)
    t_gate = 2 * t_m
    step = t_m / step_fraction
    psi0 = kitten_plus(params.n_cut).amplitudes
    target_khz = {n: preset.target_khz[n] for n in range(preset.n_levels)}
    target = _target_state(psi0, target_khz, t_gate)
    noise = NoiseParams(gamma_q=gamma_q_khz * 1e-3)

    scalars = {}
    for label, envelope in (("abrupt", Abrupt()), ("smooth", SineGate(t_gate))):
        spec = preset.drive_spec(envelope)
        h_of_t = drive_hamiltonian_factory(params, spec)
        f0 = _gate_fidelity(params, h_of_t, psi0, target, None, t_gate, step)
        f1 = _gate_fidelity(params, h_of_t, psi0, target, noise, t_gate, step)
        scalars[f"fidelity_{label}"] = f0
        scalars[f"fidelity_{label}_relaxation"] = f1
        scalars[f"added_infidelity_{label}"] = f0 - f1

    kappa_results = {}
    for kappa in kappa_scan_khz:
        spec = preset.drive_spec(Abrupt())
        h_of_t = drive_hamiltonian_factory(params, spec)
        noise_k = NoiseParams(gamma_q=gamma_q_khz * 1e-3, kappa_a=kappa * 1e-3)
        kappa_results[kappa] = _gate_fidelity(
            params, h_of_t, psi0, target, noise_k, t_gate, step)
    return ExperimentReport(
        name="pi8_gate",
        inputs={"preset": preset_name, "gamma_q_khz": gamma_q_khz,
                "kappa_scan_khz": kappa_scan_khz, "t_gate": t_gate},
        scalars=scalars,
        series={"kappa_scan": kappa_results} if kappa_results else {},
    )


# ---------------------------------------------------------------------------
# Resonant-comb per-Fock phase gate (comparison baseline)
# ---------------------------------------------------------------------------

def snap_hamiltonian_factory(
    params: SystemParams, phases: dict[int, float], t_gate: float
):
    """Drive comb resonant with each addressed per-Fock qubit line.

    Each addressed level undergoes one full Rabi cycle over t_gate, split into
    two half-cycles; the drive phase jumps by (target phase + pi) at t_gate/2,
    imparting the target geometric phase to that level.
    """
    amp = 1.0 / (2.0 * t_gate)  # MHz: each half-cycle is a pi pulse
    levels = sorted(phases)
    freqs = np.array([-n * params.chi for n in levels])
    jump = np.array([phases[n] + math.pi for n in levels])
    from .models import static_frame_hamiltonian

    h0 = static_frame_hamiltonian(params).matrix
    n_cut = params.n_cut
    dim = 2 * (n_cut + 1)
    coupling = np.zeros((dim, dim), dtype=complex)
    for n in range(n_cut + 1):
        coupling[2 * n, 2 * n + 1] = 1.0
    coupling_dag = coupling.conj().T
    half = t_gate / 2.0

    def h_of_t(t: float) -> np.ndarray:
        if not 0.0 <= t <= t_gate:
            return h0
        phase = jump if t >= half else 0.0
        c = TWO_PI * amp * complex(
            np.sum(np.exp(1j * (TWO_PI * freqs * t + phase))))
        return h0 + c * coupling + np.conj(c) * coupling_dag

    return h_of_t


def snap_gate(
    params: SystemParams,
    phases: dict[int, float],
    t_gate: float,
    psi0_cavity: np.ndarray,
    noise: NoiseParams | None = None,
    step: float | None = None,
):
    """Run the resonant-comb phase gate; returns (times, states-or-rhos)."""
    if step is None:
        step = t_gate / 8000
    h_of_t = snap_hamiltonian_factory(params, phases, t_gate)
    dims = cavity_qubit_dims(params.n_cut)
    psi0 = np.zeros(dims.total_dim, dtype=complex)
    psi0[0::2] = psi0_cavity
    config = PropagationConfig(t_span=(0.0, t_gate), step=step)
    if noise is None:
        return propagate_state(h_of_t, psi0, config)
    jumps = cavity_qubit_jumps(params, noise)
    return propagate_lindblad(h_of_t, np.outer(psi0, psi0.conj()), jumps, config)


def snap_comparison_experiment(
    gamma_q_khz: float = 3.0,
    step_fraction: int = 8000,
) -> ExperimentReport:
    """Qubit-induced infidelity of the resonant-comb realization of the same
    pi/8 code-space gate, plus the time-averaged ancilla excitation."""
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    t_m = micromotion_period(preset.tones(), preset.chi)
    t_gate = 2 * t_m
    step = t_gate / step_fraction
    psi0 = kitten_plus(params.n_cut).amplitudes
    g_khz = 20.0
    phase = TWO_PI * g_khz * 1e-3 * t_gate  # pi/8
    phases = {n: -math.copysign(phase, preset.target_khz[n]) for n in range(5)}
    target = psi0 * np.exp(1j * np.array([phases.get(n, 0.0)
                                          for n in range(params.n_cut + 1)]))

    h_of_t = snap_hamiltonian_factory(params, phases, t_gate)
    f0 = _gate_fidelity(params, h_of_t, psi0, target, None, t_gate, step)
    noise = NoiseParams(gamma_q=gamma_q_khz * 1e-3)
    f1 = _gate_fidelity(params, h_of_t, psi0, target, noise, t_gate, step)

    # Time-averaged ancilla excitation during the (noise-free) gate.
    dims = cavity_qubit_dims(params.n_cut)
    psi_full = np.zeros(dims.total_dim, dtype=complex)
    psi_full[0::2] = psi0
    record = tuple(np.linspace(0.0, t_gate, 201))
    config = PropagationConfig(t_span=(0.0, t_gate), step=step,
                               record_times=record)
    _, states = propagate_state(h_of_t, psi_full, config)
    excitation = float(np.mean([np.sum(np.abs(s[1::2]) ** 2) for s in states]))

    return ExperimentReport(
        name="snap_comparison",
        inputs={"gamma_q_khz": gamma_q_khz, "t_gate": t_gate},
        scalars={
            "fidelity": f0,
            "fidelity_relaxation": f1,
            "added_infidelity": f0 - f1,
            "mean_excitation": excitation,
        },
    )


# ---------------------------------------------------------------------------
# Rotation-angle and gate-time scalings
# ---------------------------------------------------------------------------

def theta_scaling_experiment(
    thetas: tuple[float, ...] = (math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi),
    tg_factors: tuple[float, ...] = (1.0, 2.0, 4.0),
    gamma_khz: float = 3.0,
    step_fraction: int = DEFAULT_STEP_FRACTION,
) -> ExperimentReport:
    """Ancilla-induced infidelity versus rotation angle (fixed drive, longer
    gate) and versus gate time at fixed angle (rescaled drive amplitudes).

    All runs use the smooth sine envelope. The headline qubit-induced
    infidelity isolates ancilla relaxation (no-noise minus relaxation-only);
    the series with dephasing included is reported alongside.
    """
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    t_m = micromotion_period(preset.tones(), preset.chi)
    t_star = 2 * t_m  # quarter-turn gate time
    theta_star = math.pi / 4
    psi0 = kitten_plus(params.n_cut).amplitudes
    noise_q = NoiseParams(gamma_q=gamma_khz * 1e-3)
    noise_qphi = NoiseParams(gamma_q=gamma_khz * 1e-3,
                             gamma_phi=gamma_khz * 1e-3)
    step = t_m / step_fraction

    def run(tones, t_gate, target_khz):
        spec = DriveSpec(tones=tones, envelope=SineGate(t_gate))
        target = _target_state(psi0, target_khz, t_gate)
        h_of_t = drive_hamiltonian_factory(params, spec)
        f0 = _gate_fidelity(params, h_of_t, psi0, target, None, t_gate, step)
        f1 = _gate_fidelity(params, h_of_t, psi0, target, noise_q, t_gate, step)
        f2 = _gate_fidelity(params, h_of_t, psi0, target, noise_qphi,
                            t_gate, step)
        return f0 - f1, f0 - f2

    theta_infid = {}
    theta_infid_dephasing = {}
    for theta in thetas:
        t_gate = theta / theta_star * t_star
        target_khz = {n: preset.target_khz[n] for n in range(preset.n_levels)}
        theta_infid[theta], theta_infid_dephasing[theta] = run(
            preset.tones(), t_gate, target_khz)

    tg_infid = {}
    for factor in tg_factors:
        t_gate = factor * t_star
        scale = 1.0 / math.sqrt(factor)
        tones = tuple(
            DriveTone(m=t.m, omega_amp=t.omega_amp * scale, delta=t.delta)
            for t in preset.tones()
        )
        target_khz = {n: preset.target_khz[n] / factor
                      for n in range(preset.n_levels)}
        tg_infid[factor], _ = run(tones, t_gate, target_khz)

    return ExperimentReport(
        name="theta_scaling",
        inputs={"thetas": thetas, "tg_factors": tg_factors,
                "gamma_khz": gamma_khz},
        scalars={"infidelity_2pi": theta_infid.get(2 * math.pi, float("nan"))},
        series={"theta_infidelity": theta_infid,
                "theta_infidelity_with_dephasing": theta_infid_dephasing,
                "tg_infidelity": tg_infid},
    )


# ---------------------------------------------------------------------------
# Kerr cancellation
# ---------------------------------------------------------------------------

def kerr_cancel_experiment(
    duration: float = 100.0,
    ramp_ts: float = 2.5,
    gamma_q_khz: float = 3.0,
    alpha_c: float = math.sqrt(2.0),
    step_fraction: int = DEFAULT_STEP_FRACTION,
    record_every: float = 2.0,
) -> ExperimentReport:
    """Hold a cat state against its self-Kerr by engineering the opposite
    number-dependent spectrum; compare abrupt and ramped drives, with and
    without ancilla relaxation."""
    preset = PRESETS["kerr_cancel"]
    params = preset.system_params()
    t_m = micromotion_period(preset.tones(), preset.chi)
    step = t_m / step_fraction
    # The tabulated configuration truncates the alpha=sqrt(2) cat at n=6,
    # discarding a 0.45% Fock tail; allow that here.
    psi0 = cat_state(alpha_c, "even", params.n_cut, leak_tol=1e-2).amplitudes
    target_khz = {n: 0.0 for n in range(params.n_cut + 1)}
    noise = NoiseParams(gamma_q=gamma_q_khz * 1e-3)
    record = tuple(np.arange(0.0, duration + 1e-9, record_every))

    envelopes = {
        "abrupt": Abrupt(),
        "smooth": RampUpDown(T_s=ramp_ts, t_i=0.0, t_f=duration),
    }
    scalars = {}
    series = {}
    dims = cavity_qubit_dims(params.n_cut)
    cav_dims = HilbertDims((("cavity", params.n_cut + 1),))
    for label, envelope in envelopes.items():
        spec = preset.drive_spec(envelope)
        h_of_t = drive_hamiltonian_factory(params, spec)
        config = PropagationConfig(t_span=(0.0, duration), step=step,
                                   record_times=record)
        psi_full = np.zeros(dims.total_dim, dtype=complex)
        psi_full[0::2] = psi0
        times, states = propagate_state(h_of_t, psi_full, config)
        fids = [_amplitude_fidelity(abs(psi0.conj() @ s[0::2]) ** 2
                                    + abs(psi0.conj() @ s[1::2]) ** 2)
                for s in states]
        series[f"fidelity_{label}"] = (times, np.array(fids))
        scalars[f"fidelity_{label}"] = float(fids[-1])
        idx20 = int(np.argmin(np.abs(times - 20.0)))
        scalars[f"fidelity_{label}_20us"] = float(fids[idx20])

        jumps = cavity_qubit_jumps(params, noise)
        rho0 = np.outer(psi_full, psi_full.conj())
        config_n = PropagationConfig(t_span=(0.0, duration), step=step)
        _, rhos = propagate_lindblad(h_of_t, rho0, jumps, config_n)
        cav = partial_trace(DensityMatrix(dims, rhos[-1]), ["cavity"])
        f_noise = _amplitude_fidelity(state_fidelity(cav, QuantumState(cav_dims, psi0)))
        scalars[f"fidelity_{label}_relaxation"] = f_noise
        scalars[f"added_infidelity_{label}"] = scalars[f"fidelity_{label}"] - f_noise
    return ExperimentReport(
        name="kerr_cancel",
        inputs={"duration": duration, "ramp_ts": ramp_ts,
                "gamma_q_khz": gamma_q_khz, "alpha_c": alpha_c},
        scalars=scalars,
        series=series,
    )


# ---------------------------------------------------------------------------
# Micromotion structure
# ---------------------------------------------------------------------------

def micromotion_experiment(
    preset_name: str = "z_rotation_20",
    amp_scales: tuple[float, ...] = (1.0, 0.5, 0.25),
    periods: float = 4.0,
    samples_per_period: int = 200,
) -> ExperimentReport:
    """Fidelity micromotion of a driven Fock superposition: oscillation period
    against the rational-GCD prediction, and amplitude scaling with drive."""
    preset = PRESETS[preset_name]
    params = preset.system_params()
    t_m = micromotion_period(preset.tones(), preset.chi)
    duration = periods * t_m
    psi0 = kitten_plus(params.n_cut).amplitudes
    step = t_m / 2000
    record = tuple(np.linspace(0.0, duration, int(periods * samples_per_period) + 1))
    dims = cavity_qubit_dims(params.n_cut)

    amps = {}
    series = {}
    for scale in amp_scales:
        tones = tuple(
            DriveTone(m=t.m, omega_amp=t.omega_amp * scale, delta=t.delta)
            for t in preset.tones()
        )
        spec = DriveSpec(tones=tones, envelope=Abrupt())
        # Score against the engineered spectrum scaled by the square of the
        # drive scale, the leading behavior of the energies.
        target_khz = {n: preset.target_khz[n] * scale**2
                      for n in range(preset.n_levels)}
        h_of_t = drive_hamiltonian_factory(params, spec)
        psi_full = np.zeros(dims.total_dim, dtype=complex)
        psi_full[0::2] = psi0
        config = PropagationConfig(t_span=(0.0, duration), step=step,
                                   record_times=record)
        times, states = propagate_state(h_of_t, psi_full, config)
        fids = []
        for t, s in zip(times, states):
            target = _target_state(psi0, target_khz, t)
            fids.append(_amplitude_fidelity(abs(target.conj() @ s[0::2]) ** 2
                                            + abs(target.conj() @ s[1::2]) ** 2))
        fids = np.array(fids)
        amps[scale] = float(np.max(1.0 - fids))
        series[scale] = (times, fids)

    # Oscillation period from the self-similarity of the fidelity trace: the
    # shift minimizing the RMS mismatch between the trace and its translate.
    times, fids = series[amp_scales[0]]
    dev = 1.0 - fids
    dt = times[1] - times[0]
    lo = max(2, int(0.2 * samples_per_period))
    hi = min(len(dev) - 2, 2 * samples_per_period)
    best_shift, best_rms = lo, np.inf
    for shift in range(lo, hi):
        rms = float(np.sqrt(np.mean((dev[:-shift] - dev[shift:]) ** 2)))
        if rms < best_rms:
            best_shift, best_rms = shift, rms
    period = best_shift * dt

    scales = np.array(sorted(amps))
    log_slope = np.polyfit(np.log(scales), np.log([amps[s] for s in scales]), 1)[0]
    return ExperimentReport(
        name="micromotion",
        inputs={"preset": preset_name, "amp_scales": amp_scales},
        scalars={
            "period": period,
            "period_predicted": t_m,
            "amplitude_log_slope": float(log_slope),
        },
        series={"micromotion_amplitude": amps},
    )


# ---------------------------------------------------------------------------
# Two-cavity controlled phase gate
# ---------------------------------------------------------------------------

def cphase_experiment(
    gamma_q_khz: float = 3.0,
    kappa_scan_khz: tuple[float, ...] = (),
    step_fraction: int = 1600,
) -> ExperimentReport:
    """Controlled phase gate from a joint-ancilla engineered spectrum on two
    code cavities, with relaxation on all three ancillas and loss recovery on
    both cavities."""
    params = cphase_two_cavity_params()
    specs = {
        "qubit_a": PRESETS["cphase_cavity_a"].drive_spec(),
        "qubit_b": PRESETS["cphase_cavity_b"].drive_spec(),
        "qubit_c": PRESETS["cphase_joint"].drive_spec(),
    }
    t_m = micromotion_period(specs["qubit_a"].tones, params.chi_a)
    t_gate = 2 * t_m
    step = t_m / step_fraction

    dims = two_cavity_dims(params)
    da, db = params.n_cut_a + 1, params.n_cut_b + 1
    psi_a = kitten_plus(params.n_cut_a).amplitudes
    psi_b = kitten_plus(params.n_cut_b).amplitudes
    cav0 = np.kron(psi_a, psi_b)
    psi0 = np.zeros(dims.total_dim, dtype=complex)
    psi0.reshape(da, db, 2, 2, 2)[:, :, 0, 0, 0] = cav0.reshape(da, db)

    # Target: the summed per-channel target spectra applied as diagonal phases.
    target_grid = np.zeros((da, db))
    for na in range(da):
        for nb in range(db):
            target_grid[na, nb] = (
                PRESETS["cphase_cavity_a"].target_khz[na]
                + PRESETS["cphase_cavity_b"].target_khz[nb]
                + PRESETS["cphase_joint"].target_khz[na + nb]
            )
    target = (cav0.reshape(da, db)
              * np.exp(-1j * TWO_PI * target_grid * 1e-3 * t_gate)).reshape(-1)
    cav_dims = HilbertDims((("cavity_a", da), ("cavity_b", db)))

    h_of_t = two_cavity_drive_factory(params, specs)

    def run(gamma_khz: float, kappa_khz: float) -> float:
        config = PropagationConfig(t_span=(0.0, t_gate), step=step)
        if gamma_khz == 0 and kappa_khz == 0:
            _, states = propagate_state(h_of_t, psi0, config)
            rho = np.outer(states[-1], states[-1].conj())
        else:
            jumps = two_cavity_jumps(params, gamma_khz * 1e-3, kappa_khz * 1e-3)
            _, rhos = propagate_lindblad(
                h_of_t, np.outer(psi0, psi0.conj()), jumps, config)
            rho = rhos[-1]
        cav = partial_trace(DensityMatrix(dims, rho), ["cavity_a", "cavity_b"])
        cav = kitten_recovery(cav, "cavity_a")
        cav = kitten_recovery(cav, "cavity_b")
        return _amplitude_fidelity(state_fidelity(cav, QuantumState(cav_dims, target)))

    scalars = {
        "fidelity": run(0.0, 0.0),
        "fidelity_relaxation": run(gamma_q_khz, 0.0),
    }
    kappa_results = {k: run(gamma_q_khz, k) for k in kappa_scan_khz}
    return ExperimentReport(
        name="cphase",
        inputs={"gamma_q_khz": gamma_q_khz, "kappa_scan_khz": kappa_scan_khz,
                "t_gate": t_gate},
        scalars=scalars,
        series={"kappa_scan": kappa_results} if kappa_results else {},
    )


# ---------------------------------------------------------------------------
# Error transparency under injected loss
# ---------------------------------------------------------------------------

def loss_transparency_experiment(
    preset_name: str = "z_rotation_20",
    n_injections: int = 5,
    step_fraction: int = DEFAULT_STEP_FRACTION,
) -> ExperimentReport:
    """Inject a photon loss at several times during the phase gate and verify
    that recovery restores the gate output.

    Losses at stroboscopic times (multiples of the micromotion period) are
    fully protected; mid-period losses hit the drive-dressed state and scatter
    O(drive/detuning) amplitude, costing a few tenths of a percent.
    """
    preset = PRESETS[preset_name]
    params = preset.system_params()
    t_m = micromotion_period(preset.tones(), preset.chi)
    t_gate = 2 * t_m
    step = t_m / step_fraction
    psi0_cav = kitten_plus(params.n_cut).amplitudes
    target_khz = {n: preset.target_khz[n] for n in range(preset.n_levels)}
    target = _target_state(psi0_cav, target_khz, t_gate)
    spec = preset.drive_spec(Abrupt())
    h_of_t = drive_hamiltonian_factory(params, spec)
    dims = cavity_qubit_dims(params.n_cut)
    dim = dims.total_dim
    cav_dims = HilbertDims((("cavity", params.n_cut + 1),))

    a_full = np.zeros((dim, dim), dtype=complex)
    for n in range(1, params.n_cut + 1):
        for q in range(2):
            a_full[2 * (n - 1) + q, 2 * n + q] = math.sqrt(n)

    psi_full = np.zeros(dim, dtype=complex)
    psi_full[0::2] = psi0_cav

    baseline = _gate_fidelity(params, h_of_t, psi0_cav, target, None,
                              t_gate, step)
    results = {}
    for k in range(n_injections):
        t_loss = k * t_gate / (n_injections - 1)
        if t_loss > 0:
            config1 = PropagationConfig(t_span=(0.0, t_loss), step=step)
            _, states = propagate_state(h_of_t, psi_full, config1)
            psi = states[-1]
        else:
            psi = psi_full
        psi = a_full @ psi
        psi /= np.linalg.norm(psi)
        if t_loss < t_gate:
            config2 = PropagationConfig(t_span=(t_loss, t_gate), step=step)
            _, states = propagate_state(h_of_t, psi, config2)
            psi = states[-1]
        rho = np.outer(psi, psi.conj())
        cav = partial_trace(DensityMatrix(dims, rho), ["cavity"])
        cav = kitten_recovery(cav)
        results[t_loss] = _amplitude_fidelity(
            state_fidelity(cav, QuantumState(cav_dims, target)))

    strobo = [f for t, f in results.items()
              if abs(t / t_m - round(t / t_m)) < 1e-9]
    return ExperimentReport(
        name="loss_transparency",
        inputs={"preset": preset_name, "n_injections": n_injections},
        scalars={"fidelity_no_loss": baseline,
                 "worst_fidelity_with_loss": min(results.values()),
                 "worst_fidelity_stroboscopic": min(strobo)},
        series={"loss_times": results},
    )
