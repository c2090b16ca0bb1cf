import math

import numpy as np
import pytest

from pnd.codes import kitten_plus
from pnd.dynamics import (
    JumpSet,
    PropagationConfig,
    cavity_qubit_jumps,
    drive_hamiltonian_factory,
    fidelity_trace,
    propagate_lindblad,
    propagate_state,
)
from pnd.effective import micromotion_period, qubit_excitation_prob, spectrum_order4
from pnd.models import Abrupt, DriveSpec, NoiseParams, SystemParams, cavity_qubit_dims
from pnd.presets import PRESETS

TWO_PI = 2 * math.pi


def test_config_rejects_bad_step():
    with pytest.raises(ValueError):
        PropagationConfig(t_span=(0.0, 1.0), step=0.0)
    with pytest.raises(ValueError):
        PropagationConfig(t_span=(1.0, 0.0), step=0.1)


def test_jump_rates_must_be_nonnegative():
    with pytest.raises(ValueError):
        JumpSet(operators=((np.eye(2), -1.0),))


def test_zero_hamiltonian_constant_state():
    psi0 = np.array([0.6, 0.8], dtype=complex)
    h = np.zeros((2, 2), dtype=complex)
    _, states = propagate_state(lambda t: h, psi0,
                                PropagationConfig((0.0, 1.0), 1e-3))
    assert np.allclose(states[-1], psi0, atol=1e-12)


def test_diagonal_hamiltonian_exact_phases():
    freqs = np.array([0.0, 1.3, -0.7, 2.1])  # rad/us
    h = np.diag(freqs).astype(complex)
    psi0 = np.full(4, 0.5, dtype=complex)
    t_end = 2.0
    _, states = propagate_state(lambda t: h, psi0,
                                PropagationConfig((0.0, t_end), 1e-4))
    expected = 0.5 * np.exp(-1j * freqs * t_end)
    assert np.max(np.abs(states[-1] - expected)) < 1e-9


def test_norm_preserved_under_drive():
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    h = drive_hamiltonian_factory(params, preset.drive_spec())
    dims = cavity_qubit_dims(params.n_cut)
    psi0 = np.zeros(dims.total_dim, dtype=complex)
    psi0[0] = 1.0
    t_m = micromotion_period(preset.tones(), params.chi)
    _, states = propagate_state(h, psi0,
                                PropagationConfig((0.0, 4 * t_m), t_m / 2000))
    assert abs(np.linalg.norm(states[-1]) - 1.0) < 1e-8


def test_fock_state_returns_after_one_period():
    """Each |n, g> under the reference drive rewinds at T_M up to the phase
    set by the engineered energy."""
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    tones = preset.tones()
    t_m = micromotion_period(tones, params.chi)
    energies = spectrum_order4(params, tones).energies
    h = drive_hamiltonian_factory(params, preset.drive_spec())
    dims = cavity_qubit_dims(params.n_cut)
    for n in range(params.n_cut + 1):
        psi0 = np.zeros(dims.total_dim, dtype=complex)
        psi0[2 * n] = 1.0
        _, states = propagate_state(
            h, psi0, PropagationConfig((0.0, t_m), t_m / 4000))
        overlap = states[-1][2 * n]
        p_e = qubit_excitation_prob(params, tones, n, True)
        assert abs(overlap) ** 2 >= 1.0 - 3 * p_e * 0.1
        phase = -np.angle(overlap)
        target = TWO_PI * energies[n] * t_m
        diff = (phase - target + math.pi) % TWO_PI - math.pi
        assert abs(diff) < 0.02


def test_lindblad_no_jumps_matches_schroedinger():
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    h = drive_hamiltonian_factory(params, preset.drive_spec())
    dims = cavity_qubit_dims(params.n_cut)
    psi0 = np.zeros(dims.total_dim, dtype=complex)
    psi0[0::2] = kitten_plus(params.n_cut).amplitudes
    t_m = micromotion_period(preset.tones(), params.chi)
    cfg = PropagationConfig((0.0, t_m), t_m / 2000)
    _, states = propagate_state(h, psi0, cfg)
    _, rhos = propagate_lindblad(h, np.outer(psi0, psi0.conj()),
                                 JumpSet(operators=()), cfg)
    pure = np.outer(states[-1], states[-1].conj())
    assert np.linalg.norm(rhos[-1] - pure) < 1e-7


def test_photon_loss_vacuum_invariant():
    params = SystemParams(chi=2.56, n_cut=3)
    jumps = cavity_qubit_jumps(params, NoiseParams(kappa_a=0.05))
    dims = cavity_qubit_dims(params.n_cut)
    rho0 = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
    rho0[0, 0] = 1.0
    h0 = np.zeros_like(rho0)
    _, rhos = propagate_lindblad(lambda t: h0, rho0, jumps,
                                 PropagationConfig((0.0, 5.0), 1e-3))
    assert np.linalg.norm(rhos[-1] - rho0) < 1e-10


def test_photon_loss_rate_convention():
    """|1> population decays as exp(-2 pi kappa t) with kappa an ordinary
    (non-angular) frequency in MHz."""
    kappa = 0.05  # MHz
    params = SystemParams(chi=2.56, n_cut=3)
    jumps = cavity_qubit_jumps(params, NoiseParams(kappa_a=kappa))
    dims = cavity_qubit_dims(params.n_cut)
    rho0 = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
    rho0[2, 2] = 1.0  # |1, g>
    h0 = np.zeros_like(rho0)
    t_end = 2.0
    _, rhos = propagate_lindblad(lambda t: h0, rho0, jumps,
                                 PropagationConfig((0.0, t_end), 1e-3))
    p1 = rhos[-1][2, 2].real
    assert p1 == pytest.approx(math.exp(-TWO_PI * kappa * t_end), abs=1e-6)


def test_lindblad_density_matrix_stays_physical():
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    h = drive_hamiltonian_factory(params, preset.drive_spec())
    jumps = cavity_qubit_jumps(params, NoiseParams(gamma_q=3e-3,
                                                   gamma_phi=3e-3,
                                                   kappa_a=1e-5))
    dims = cavity_qubit_dims(params.n_cut)
    psi0 = np.zeros(dims.total_dim, dtype=complex)
    psi0[0::2] = kitten_plus(params.n_cut).amplitudes
    t_m = micromotion_period(preset.tones(), params.chi)
    _, rhos = propagate_lindblad(h, np.outer(psi0, psi0.conj()), jumps,
                                 PropagationConfig((0.0, 2 * t_m), t_m / 2000))
    rho = rhos[-1]
    assert abs(np.trace(rho).real - 1.0) < 1e-6
    assert np.linalg.norm(rho - rho.conj().T) < 1e-10
    assert np.linalg.eigvalsh(rho).min() > -1e-6


def test_record_times_returned_in_order():
    params = SystemParams(chi=2.56, n_cut=3)
    dims = cavity_qubit_dims(params.n_cut)
    psi0 = np.zeros(dims.total_dim, dtype=complex)
    psi0[0] = 1.0
    h0 = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
    record = (0.75, 0.25, 0.5)
    times, states = propagate_state(
        lambda t: h0, psi0,
        PropagationConfig((0.0, 1.0), 1e-3, record_times=record))
    assert list(times) == [0.25, 0.5, 0.75, 1.0]
    assert len(states) == 4


def test_fidelity_trace_trivial():
    params = SystemParams(chi=2.56, n_cut=4)
    spec = DriveSpec(tones=(), envelope=Abrupt())
    psi0 = kitten_plus(params.n_cut).amplitudes
    times, fids = fidelity_trace(
        params, spec, {n: 0.0 for n in range(5)}, psi0, None,
        PropagationConfig((0.0, 1.0), 1e-3,
                          record_times=tuple(np.linspace(0, 1, 11))))
    assert np.allclose(fids, 1.0, atol=1e-10)


def test_fidelity_trace_step_halving_converges():
    preset = PRESETS["z_rotation_20"]
    params = preset.system_params()
    target = {n: preset.target_khz[n] for n in range(preset.n_levels)}
    psi0 = kitten_plus(params.n_cut).amplitudes
    t_m = micromotion_period(preset.tones(), params.chi)
    finals = []
    for step in (t_m / 2000, t_m / 4000):
        _, fids = fidelity_trace(params, preset.drive_spec(), target, psi0,
                                 None, PropagationConfig((0.0, 2 * t_m), step))
        finals.append(fids[-1])
    assert abs(finals[0] - finals[1]) < 1e-5
