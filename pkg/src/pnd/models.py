"""System parameters, drive tones, envelopes, and Hamiltonian builders.

Units: all user-facing frequencies are ordinary (cyclic) frequencies in MHz
(values of omega/2pi); times are in microseconds. Hamiltonian matrices are in
angular units (rad/us); the 2*pi conversion happens exactly once, here.

Frame: all Hamiltonians are built in the rotating frame of the bare cavity and
qubit frequencies, so only the dispersive constants enter numerics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .qcore import (
    CompositeOperator,
    HilbertDims,
    annihilation,
    single_dims,
)

TWO_PI = 2.0 * math.pi

LAMBDA_S = (math.sqrt(46.0) - 1.0) / 5.0  # ramp plateau-matching amplitude


# ---------------------------------------------------------------------------
# Parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemParams:
    """Dispersive single-cavity constants (MHz) and Fock truncation."""

    chi: float
    kerr: float = 0.0
    chi_prime: float = 0.0
    n_cut: int = 6

    def __post_init__(self):
        if self.chi <= 0:
            raise ValueError("chi must be positive")
        if abs(self.kerr) > self.chi / 10 or abs(self.chi_prime) > self.chi / 10:
            warnings.warn("kerr/chi_prime not small compared to chi", stacklevel=2)


@dataclass(frozen=True)
class TwoCavityParams:
    """Two cavities, each with its own ancilla, plus a shared ancilla (MHz)."""

    chi_a: float
    chi_b: float
    chi_c: float
    n_cut_a: int = 4
    n_cut_b: int = 4

    def __post_init__(self):
        if min(self.chi_a, self.chi_b, self.chi_c) <= 0:
            raise ValueError("all dispersive shifts must be positive")


@dataclass(frozen=True)
class JCParams:
    """Microscopic qubit-cavity constants (MHz): coupling, detuning, anharmonicity."""

    g: float
    delta_qa: float
    alpha: float

    def __post_init__(self):
        if abs(self.g) > abs(self.delta_qa) / 5:
            warnings.warn("g not small compared to qubit-cavity detuning", stacklevel=2)


@dataclass(frozen=True)
class NoiseParams:
    """Decoherence rates in MHz (cyclic)."""

    gamma_q: float = 0.0
    gamma_phi: float = 0.0
    kappa_a: float = 0.0

    def __post_init__(self):
        if min(self.gamma_q, self.gamma_phi, self.kappa_a) < 0:
            raise ValueError("rates must be non-negative")


@dataclass(frozen=True)
class DriveTone:
    """One drive tone addressing Fock index m, detuned by delta = (p/q) * chi."""

    m: int
    omega_amp: complex  # MHz, may be negative/complex
    delta: Fraction  # in units of chi, exact rational

    def __post_init__(self):
        if self.delta == 0:
            raise ValueError("tone detuning must be non-zero")

    def delta_mhz(self, chi: float) -> float:
        return float(self.delta) * chi


# Envelope variants ---------------------------------------------------------

@dataclass(frozen=True)
class Abrupt:
    t_i: float = 0.0
    t_f: float = math.inf


@dataclass(frozen=True)
class SineGate:
    T_G: float


@dataclass(frozen=True)
class RampUpDown:
    T_s: float
    t_i: float
    t_f: float

    def __post_init__(self):
        if self.t_f - self.t_i < 6 * self.T_s:
            raise ValueError("ramp window requires t_f - t_i >= 6 * T_s")


Envelope = Abrupt | SineGate | RampUpDown


def envelope_value(env: Envelope, t: float) -> float:
    """Drive amplitude scale factor at time t."""
    if isinstance(env, Abrupt):
        return 1.0 if env.t_i <= t <= env.t_f else 0.0
    if isinstance(env, SineGate):
        if not 0.0 <= t <= env.T_G:
            return 0.0
        return math.sqrt(2.0) * math.sin(math.pi * t / env.T_G)
    if isinstance(env, RampUpDown):
        return _ramp_value(env, t)
    raise TypeError(f"unknown envelope {env!r}")


def _ramp_value(env: RampUpDown, t: float) -> float:
    ts, ti, tf = env.T_s, env.t_i, env.t_f
    if t < ti or t > tf:
        return 0.0
    for u in (t - ti, tf - t):  # ramp-up, then time-mirrored ramp-down
        if u < ts:
            return LAMBDA_S * math.sin(math.pi * u / (2 * ts))
        if u < 3 * ts:
            return (LAMBDA_S - 1) / 2 * math.sin(math.pi * u / (2 * ts)) \
                + (LAMBDA_S + 1) / 2
    return 1.0


@dataclass(frozen=True)
class DriveSpec:
    """A tone set plus envelope, optionally tagged with the ancilla it drives."""

    tones: tuple[DriveTone, ...]
    envelope: Envelope = Abrupt()
    target_qubit: str = "qubit"

    def __post_init__(self):
        seen = set()
        for tone in self.tones:
            key = (tone.m, tone.delta)
            if key in seen:
                raise ValueError(f"duplicate tone (m={tone.m}, delta={tone.delta})")
            seen.add(key)


def validate_tone_amplitudes(spec: DriveSpec, chi: float, ratio: float = 0.35) -> list[str]:
    """Flag tones violating the off-resonance smallness condition."""
    flags = []
    for tone in spec.tones:
        d = abs(tone.delta_mhz(chi))
        amp = abs(tone.omega_amp)
        if amp > ratio * d or amp > ratio * abs(chi - d):
            flags.append(f"tone m={tone.m}: |omega|={amp:.4g} MHz vs delta {d:.4g} MHz")
    return flags


# ---------------------------------------------------------------------------
# Hamiltonian builders
# ---------------------------------------------------------------------------

def cavity_qubit_dims(n_cut: int) -> HilbertDims:
    return HilbertDims((("cavity", n_cut + 1), ("qubit", 2)))


def interaction_drive_hamiltonian(
    params: SystemParams, spec: DriveSpec, t: float
) -> CompositeOperator:
    """Drive operator in the fully number-resolved interaction picture.

    Each |n><n| (sigma-) term carries phase exp(i*2pi*[(n-m)chi + delta_m
    - chi' n(n-1)/2] * t), multiplied by the envelope value.
    """
    n_cut = params.n_cut
    dims = cavity_qubit_dims(n_cut)
    lam = envelope_value(spec.envelope, t)
    h = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
    if lam == 0.0:
        return CompositeOperator(dims, h)
    ns = np.arange(n_cut + 1)
    for tone in spec.tones:
        freq = (ns - tone.m) * params.chi + tone.delta_mhz(params.chi) \
            - params.chi_prime * ns * (ns - 1) / 2.0
        coeff = TWO_PI * lam * tone.omega_amp * np.exp(1j * TWO_PI * freq * t)
        # |n, e> -> |n, g| coupling: row (n, g), column (n, e).
        for n in ns:
            h[2 * n, 2 * n + 1] += coeff[n]
    h = h + h.conj().T
    return CompositeOperator(dims, h)


def static_frame_hamiltonian(params: SystemParams) -> CompositeOperator:
    """Diagonal frame Hamiltonian (rad/us): dispersive shift, Kerr, chi' terms."""
    n_cut = params.n_cut
    dims = cavity_qubit_dims(n_cut)
    diag = np.zeros(dims.total_dim)
    for n in range(n_cut + 1):
        kerr_term = -TWO_PI * params.kerr / 2.0 * n * (n - 1)
        diag[2 * n] = kerr_term  # |n, g>
        diag[2 * n + 1] = kerr_term - TWO_PI * params.chi * n \
            + TWO_PI * params.chi_prime / 2.0 * n * (n - 1)  # |n, e>
    return CompositeOperator(dims, np.diag(diag.astype(complex)))


def frame_drive_hamiltonian(
    params: SystemParams, spec: DriveSpec, t: float
) -> np.ndarray:
    """Drive operator in the same frame as static_frame_hamiltonian (rad/us).

    Tone phases are exp(i*2pi*(delta_m - m*chi)*t); the Fock dependence enters
    via the static dispersive shift, not the drive phases.
    """
    n_cut = params.n_cut
    dim = 2 * (n_cut + 1)
    lam = envelope_value(spec.envelope, t)
    h = np.zeros((dim, dim), dtype=complex)
    if lam == 0.0:
        return h
    coeff = 0.0 + 0j
    for tone in spec.tones:
        freq = tone.delta_mhz(params.chi) - tone.m * params.chi
        coeff += tone.omega_amp * np.exp(1j * TWO_PI * freq * t)
    coeff *= TWO_PI * lam
    for n in range(n_cut + 1):
        h[2 * n, 2 * n + 1] = coeff
        h[2 * n + 1, 2 * n] = np.conj(coeff)
    return h


# ---------------------------------------------------------------------------
# Microscopic-to-dispersive mapping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DispersiveConstants:
    chi: float
    kerr: float
    chi_prime: float


def jc_to_dispersive(jc: JCParams) -> DispersiveConstants:
    """Perturbative dispersive constants from microscopic coupling parameters.

    All formulas are homogeneous of degree one in frequency, so they may be
    evaluated directly with cyclic-frequency (MHz) inputs.
    """
    g, d, a = jc.g, jc.delta_qa, jc.alpha
    pole_scale = 1e-6 * abs(d) ** 3
    denoms = [d, d + a, a + 2 * d, 3 * a + 2 * d]
    for den in denoms:
        if abs(den) ** 3 < pole_scale or abs(den) < 1e-12:
            raise ValueError(f"dispersive expansion pole: denominator {den:.3g} MHz")
    chi = 2 * g**2 * a / (d * (d + a)) \
        - 4 * g**4 * a * (a**2 + 2 * a * d + 2 * d**2) / (d**3 * (d + a) ** 3)
    kerr = 2 * g**4 * a / (d**3 * (a + 2 * d))
    chi_prime = 4 * g**4 * a**2 * (3 * a**3 + 11 * a**2 * d + 15 * a * d**2 + 9 * d**3) \
        / (d**3 * (a + d) ** 3 * (a + 2 * d) * (3 * a + 2 * d))
    return DispersiveConstants(chi=chi, kerr=kerr, chi_prime=chi_prime)


def transmon_cavity_hamiltonian(
    jc: JCParams, n_cav: int, n_transmon: int
) -> CompositeOperator:
    """Full coupled anharmonic-mode model (rad/us) in the rotating frame of the
    cavity, for cross-checking the dispersive expansion by exact diagonalization.
    """
    a_cav = annihilation(n_cav - 1, "cavity").matrix
    b = annihilation(n_transmon - 1, "transmon").matrix
    i_cav = np.eye(n_cav)
    i_tr = np.eye(n_transmon)
    nb = b.conj().T @ b
    h = (
        -jc.delta_qa * np.kron(i_cav, nb)
        - jc.alpha / 2.0 * np.kron(i_cav, b.conj().T @ b.conj().T @ b @ b)
        + jc.g * (np.kron(a_cav, b.conj().T) + np.kron(a_cav.conj().T, b))
    )
    dims = HilbertDims((("cavity", n_cav), ("transmon", n_transmon)))
    return CompositeOperator(dims, TWO_PI * h.astype(complex))


# ---------------------------------------------------------------------------
# Two-cavity model
# ---------------------------------------------------------------------------

def two_cavity_dims(params: TwoCavityParams) -> HilbertDims:
    return HilbertDims((
        ("cavity_a", params.n_cut_a + 1),
        ("cavity_b", params.n_cut_b + 1),
        ("qubit_a", 2),
        ("qubit_b", 2),
        ("qubit_c", 2),
    ))


def _two_cavity_number_grids(params: TwoCavityParams):
    na = np.arange(params.n_cut_a + 1)
    nb = np.arange(params.n_cut_b + 1)
    return np.meshgrid(na, nb, indexing="ij")


def two_cavity_static_hamiltonian(params: TwoCavityParams) -> CompositeOperator:
    """Diagonal frame Hamiltonian (rad/us) for the two-cavity, three-ancilla model.

    Each local ancilla sees its own cavity number; the shared ancilla sees the
    joint photon number n_a + n_b.
    """
    dims = two_cavity_dims(params)
    da, db = params.n_cut_a + 1, params.n_cut_b + 1
    diag = np.zeros(dims.total_dim)
    idx = 0
    for na in range(da):
        for nb in range(db):
            for qa in range(2):
                for qb in range(2):
                    for qc in range(2):
                        diag[idx] = -TWO_PI * (
                            params.chi_a * na * qa
                            + params.chi_b * nb * qb
                            + params.chi_c * (na + nb) * qc
                        )
                        idx += 1
    return CompositeOperator(dims, np.diag(diag.astype(complex)))


def two_cavity_sigma_minus(params: TwoCavityParams, label: str) -> np.ndarray:
    """Lowering operator of one ancilla embedded in the full two-cavity space."""
    dims = two_cavity_dims(params)
    sm = np.zeros((2, 2), dtype=complex)
    sm[0, 1] = 1.0
    mats = []
    for lab, d in dims.subsystems:
        if lab == label:
            mats.append(sm)
        else:
            mats.append(np.eye(d, dtype=complex))
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def two_cavity_frame_drive_coefficient(
    params: TwoCavityParams, label: str, spec: DriveSpec, t: float
) -> complex:
    """Scalar drive coefficient (rad/us) for one ancilla in the static frame."""
    chi = {"qubit_a": params.chi_a, "qubit_b": params.chi_b,
           "qubit_c": params.chi_c}[label]
    lam = envelope_value(spec.envelope, t)
    if lam == 0.0:
        return 0.0
    coeff = 0.0 + 0j
    for tone in spec.tones:
        freq = tone.delta_mhz(chi) - tone.m * chi
        coeff += tone.omega_amp * np.exp(1j * TWO_PI * freq * t)
    return TWO_PI * lam * coeff


def two_cavity_drive_hamiltonian(
    params: TwoCavityParams, specs: dict[str, DriveSpec], t: float
) -> CompositeOperator:
    """Interaction-picture drive on cavities a, b and ancillas a, b, c.

    Ancilla a/b tone phases depend on their own cavity number; ancilla c tone
    phases depend on the joint number n_a + n_b.
    """
    dims = two_cavity_dims(params)
    da, db = params.n_cut_a + 1, params.n_cut_b + 1
    h = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
    chi_map = {"qubit_a": params.chi_a, "qubit_b": params.chi_b, "qubit_c": params.chi_c}
    grid_a, grid_b = _two_cavity_number_grids(params)

    def qubit_index(label: str) -> int:
        return {"qubit_a": 0, "qubit_b": 1, "qubit_c": 2}[label]

    for label, spec in specs.items():
        if label not in chi_map:
            raise KeyError(f"unknown drive target {label!r}")
        chi = chi_map[label]
        lam = envelope_value(spec.envelope, t)
        if lam == 0.0:
            continue
        number = {"qubit_a": grid_a, "qubit_b": grid_b, "qubit_c": grid_a + grid_b}[label]
        q = qubit_index(label)
        for tone in spec.tones:
            freq = (number - tone.m) * chi + tone.delta_mhz(chi)
            coeff = TWO_PI * lam * tone.omega_amp * np.exp(1j * TWO_PI * freq * t)
            for ia in range(da):
                for ib in range(db):
                    # base index with all qubits ground
                    for qa in range(2):
                        for qb in range(2):
                            for qc in range(2):
                                state = [qa, qb, qc]
                                if state[q] != 0:
                                    continue
                                row = ((ia * db + ib) * 2 + qa) * 4 + qb * 2 + qc
                                state[q] = 1
                                col = ((ia * db + ib) * 2 + state[0]) * 4 \
                                    + state[1] * 2 + state[2]
                                h[row, col] += coeff[ia, ib]
    h = h + h.conj().T
    return CompositeOperator(dims, h)
