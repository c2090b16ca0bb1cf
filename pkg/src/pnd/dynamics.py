"""Time-domain propagation: Schrodinger and Lindblad evolution, fidelity traces.

Propagation uses a fixed-step classical Runge-Kutta (order 4) integrator for
bit-reproducibility. Hamiltonian callables return matrices in rad/us; all
decoherence rates are cyclic (MHz) and are converted to angular rates here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .models import (
    TWO_PI,
    DriveSpec,
    NoiseParams,
    SystemParams,
    TwoCavityParams,
    cavity_qubit_dims,
    envelope_value,
    frame_drive_hamiltonian,
    static_frame_hamiltonian,
    two_cavity_dims,
    two_cavity_frame_drive_coefficient,
    two_cavity_sigma_minus,
    two_cavity_static_hamiltonian,
)
from .qcore import (
    CompositeOperator,
    DensityMatrix,
    HilbertDims,
    QuantumState,
    partial_trace,
    state_fidelity,
)

__all__ = [
    "PropagationConfig",
    "JumpSet",
    "propagate_state",
    "propagate_lindblad",
    "fidelity_trace",
    "cavity_qubit_jumps",
    "two_cavity_jumps",
    "drive_hamiltonian_factory",
]


@dataclass(frozen=True)
class PropagationConfig:
    t_span: tuple[float, float]
    step: float
    record_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.t_span[1] < self.t_span[0]:
            raise ValueError("empty time span")


@dataclass(frozen=True)
class JumpSet:
    """Collapse operators with cyclic rates (MHz)."""

    operators: tuple[tuple[np.ndarray, float], ...]

    def __post_init__(self):
        for _, rate in self.operators:
            if rate < 0:
                raise ValueError("jump rates must be non-negative")

    def angular_operators(self) -> list[np.ndarray]:
        """Operators scaled so that L rho L' terms carry rad/us rates."""
        return [math.sqrt(TWO_PI * rate) * op
                for op, rate in self.operators if rate > 0]


def _time_grid(config: PropagationConfig):
    t_i, t_f = config.t_span
    steps = max(1, int(round((t_f - t_i) / config.step)))
    h = (t_f - t_i) / steps
    record = sorted(set(config.record_times) | {t_f})
    record_idx = {}
    for t in record:
        k = int(round((t - t_i) / h))
        record_idx.setdefault(min(max(k, 0), steps), t)
    return t_i, h, steps, record_idx


def propagate_state(h_of_t, psi0: np.ndarray, config: PropagationConfig):
    """Fixed-step RK4 Schrodinger integration; returns (times, state vectors)."""
    t_i, h, steps, record_idx = _time_grid(config)
    psi = psi0.astype(complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("initial state is not normalized")
    times, states = [], []
    if 0 in record_idx:
        times.append(t_i)
        states.append(psi.copy())
    t = t_i
    for k in range(steps):
        k1 = -1j * (h_of_t(t) @ psi)
        k2 = -1j * (h_of_t(t + h / 2) @ (psi + h / 2 * k1))
        k3 = -1j * (h_of_t(t + h / 2) @ (psi + h / 2 * k2))
        k4 = -1j * (h_of_t(t + h) @ (psi + h * k3))
        psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_i + (k + 1) * h
        if k + 1 in record_idx:
            times.append(t)
            states.append(psi.copy())
    drift = abs(np.linalg.norm(states[-1]) - 1.0)
    if drift > 1e-6:
        raise RuntimeError(f"norm drift {drift:.2e} exceeds tolerance; reduce step")
    return np.array(times), states


def propagate_lindblad(h_of_t, rho0: np.ndarray, jumps: JumpSet,
                       config: PropagationConfig):
    """Fixed-step RK4 Lindblad integration; returns (times, density matrices)."""
    t_i, h, steps, record_idx = _time_grid(config)
    rho = rho0.astype(complex).copy()
    ls = jumps.angular_operators()
    lds = [l.conj().T for l in ls]
    ldl_half = sum((ld @ l for l, ld in zip(ls, lds)),
                   start=np.zeros_like(rho)) / 2.0

    def rhs(t, r):
        hmat = h_of_t(t)
        out = -1j * (hmat @ r - r @ hmat)
        out -= ldl_half @ r + r @ ldl_half
        for l, ld in zip(ls, lds):
            out += l @ r @ ld
        return out

    times, rhos = [], []
    if 0 in record_idx:
        times.append(t_i)
        rhos.append(rho.copy())
    t = t_i
    for k in range(steps):
        k1 = rhs(t, rho)
        k2 = rhs(t + h / 2, rho + h / 2 * k1)
        k3 = rhs(t + h / 2, rho + h / 2 * k2)
        k4 = rhs(t + h, rho + h * k3)
        rho = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = (rho + rho.conj().T) / 2.0
        t = t_i + (k + 1) * h
        if k + 1 in record_idx:
            times.append(t)
            rhos.append(rho.copy())
    drift = abs(np.trace(rhos[-1]).real - np.trace(rho0).real)
    if drift > 1e-6:
        raise RuntimeError(f"trace drift {drift:.2e} exceeds tolerance; reduce step")
    return np.array(times), rhos


# ---------------------------------------------------------------------------
# Model-specific Hamiltonian factories and jump sets
# ---------------------------------------------------------------------------

def drive_hamiltonian_factory(params: SystemParams, spec: DriveSpec):
    """H(t) (rad/us) for the driven cavity-qubit model in the static frame."""
    h0 = static_frame_hamiltonian(params).matrix
    n_cut = params.n_cut
    dim = 2 * (n_cut + 1)
    coupling = np.zeros((dim, dim), dtype=complex)
    for n in range(n_cut + 1):
        coupling[2 * n, 2 * n + 1] = 1.0
    coupling_dag = coupling.conj().T
    freqs = np.array([t.delta_mhz(params.chi) - t.m * params.chi
                      for t in spec.tones])
    amps = np.array([t.omega_amp for t in spec.tones], dtype=complex)
    env = spec.envelope

    def h_of_t(t: float) -> np.ndarray:
        lam = envelope_value(env, t)
        if lam == 0.0:
            return h0
        c = TWO_PI * lam * complex(np.sum(amps * np.exp(1j * TWO_PI * freqs * t)))
        return h0 + c * coupling + np.conj(c) * coupling_dag

    return h_of_t


def cavity_qubit_jumps(params: SystemParams, noise: NoiseParams) -> JumpSet:
    """Qubit relaxation and dephasing plus cavity photon loss."""
    n_cut = params.n_cut
    dim = 2 * (n_cut + 1)
    ops = []
    if noise.gamma_q > 0:
        sm = np.zeros((dim, dim), dtype=complex)
        for n in range(n_cut + 1):
            sm[2 * n, 2 * n + 1] = 1.0
        ops.append((sm, noise.gamma_q))
    if noise.gamma_phi > 0:
        pe = np.zeros((dim, dim), dtype=complex)
        for n in range(n_cut + 1):
            pe[2 * n + 1, 2 * n + 1] = 1.0
        ops.append((pe, noise.gamma_phi))
    if noise.kappa_a > 0:
        a = np.zeros((dim, dim), dtype=complex)
        for n in range(1, n_cut + 1):
            for q in range(2):
                a[2 * (n - 1) + q, 2 * n + q] = math.sqrt(n)
        ops.append((a, noise.kappa_a))
    return JumpSet(tuple(ops))


def two_cavity_drive_factory(params: TwoCavityParams, specs: dict[str, DriveSpec]):
    """H(t) (rad/us) for the two-cavity, three-ancilla model in the static frame."""
    h0 = two_cavity_static_hamiltonian(params).matrix
    couplings = {label: two_cavity_sigma_minus(params, label) for label in specs}
    couplings_dag = {label: m.conj().T for label, m in couplings.items()}

    def h_of_t(t: float) -> np.ndarray:
        h = h0
        acc = None
        for label, spec in specs.items():
            c = two_cavity_frame_drive_coefficient(params, label, spec, t)
            if c == 0.0:
                continue
            term = c * couplings[label] + np.conj(c) * couplings_dag[label]
            acc = term if acc is None else acc + term
        return h if acc is None else h + acc

    return h_of_t


def two_cavity_jumps(params: TwoCavityParams, gamma_q: float,
                     kappa: float = 0.0) -> JumpSet:
    """Equal relaxation on all three ancillas, optional equal cavity loss."""
    ops = []
    if gamma_q > 0:
        for label in ("qubit_a", "qubit_b", "qubit_c"):
            ops.append((two_cavity_sigma_minus(params, label), gamma_q))
    if kappa > 0:
        dims = two_cavity_dims(params)
        da, db = params.n_cut_a + 1, params.n_cut_b + 1
        for which, d_local in (("a", da), ("b", db)):
            a_local = np.zeros((d_local, d_local), dtype=complex)
            for n in range(1, d_local):
                a_local[n - 1, n] = math.sqrt(n)
            mats = []
            for lab, d in dims.subsystems:
                if lab == f"cavity_{which}":
                    mats.append(a_local)
                else:
                    mats.append(np.eye(d, dtype=complex))
            full = mats[0]
            for m in mats[1:]:
                full = np.kron(full, m)
            ops.append((full, kappa))
    return JumpSet(tuple(ops))


# ---------------------------------------------------------------------------
# Fidelity tracking against a diagonal target Hamiltonian
# ---------------------------------------------------------------------------

def _target_phases(target_khz: dict, t: float) -> np.ndarray:
    levels = sorted(target_khz)
    e_mhz = np.array([target_khz[n] for n in levels]) * 1e-3
    return np.exp(-1j * TWO_PI * e_mhz * t)


def fidelity_trace(
    params: SystemParams,
    spec: DriveSpec,
    target_khz: dict,
    psi0_cavity: np.ndarray,
    noise: NoiseParams | None,
    config: PropagationConfig,
):
    """Fidelity of the cavity-reduced driven state against target evolution.

    The target state evolves under the diagonal cavity Hamiltonian given by
    target_khz; the full model starts in (cavity state) x |g> and the fidelity
    is evaluated on the cavity-reduced density matrix at each record time.
    """
    n_cut = params.n_cut
    dims = cavity_qubit_dims(n_cut)
    dim = dims.total_dim
    psi0 = np.zeros(dim, dtype=complex)
    psi0[0::2] = psi0_cavity  # qubit ground amplitudes
    h_of_t = drive_hamiltonian_factory(params, spec)
    cav_dims = HilbertDims((("cavity", n_cut + 1),))

    if noise is None or (noise.gamma_q == 0 and noise.gamma_phi == 0
                         and noise.kappa_a == 0):
        times, states = propagate_state(h_of_t, psi0, config)
        fids = []
        for t, psi in zip(times, states):
            target = psi0_cavity * _target_phases(target_khz, t)
            amp_g = target.conj() @ psi[0::2]
            amp_e = target.conj() @ psi[1::2]
            fids.append(abs(amp_g) ** 2 + abs(amp_e) ** 2)
        return times, np.array(fids)

    jumps = cavity_qubit_jumps(params, noise)
    rho0 = np.outer(psi0, psi0.conj())
    times, rhos = propagate_lindblad(h_of_t, rho0, jumps, config)
    fids = []
    for t, rho in zip(times, rhos):
        target = psi0_cavity * _target_phases(target_khz, t)
        full = DensityMatrix(dims, rho)
        cav = partial_trace(full, ["cavity"])
        fids.append(state_fidelity(cav, QuantumState(cav_dims, target)))
    return times, np.array(fids)
