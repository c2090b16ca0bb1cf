import math

import numpy as np
import pytest

from pnd.codes import kitten_plus
from pnd.effective import spectrum_order4, two_cavity_spectrum
from pnd.experiments import ExperimentReport, snap_gate
from pnd.models import SystemParams
from pnd.presets import PRESETS, cphase_two_cavity_params

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# Report plumbing
# ---------------------------------------------------------------------------

def test_report_provenance_deterministic():
    a = ExperimentReport("x", {"p": 1, "q": [1, 2]}, {"f": 0.5})
    b = ExperimentReport("x", {"q": [1, 2], "p": 1}, {"f": 0.9})
    c = ExperimentReport("x", {"p": 2, "q": [1, 2]}, {"f": 0.5})
    assert a.provenance == b.provenance  # key order and results don't matter
    assert a.provenance != c.provenance  # inputs do


def test_report_fidelities_in_unit_interval(loss_report):
    for key, val in loss_report.scalars.items():
        assert 0.0 <= val <= 1.0, key
    for val in loss_report.series["loss_times"].values():
        assert 0.0 <= val <= 1.0


# ---------------------------------------------------------------------------
# Resonant-comb phase gate building block
# ---------------------------------------------------------------------------

def test_snap_zero_phases_is_identity():
    """With a drive weak enough that cross-talk on the comb edges is
    negligible (residual excitation scales as (2*amp/chi)^2), one full Rabi
    cycle with a flat phase profile is the identity."""
    params = PRESETS["z_rotation_20"].system_params()
    psi0 = kitten_plus(params.n_cut).amplitudes
    t_gate = 80.0
    phases = {n: 0.0 for n in range(5)}
    _, states = snap_gate(params, phases, t_gate, psi0, step=t_gate / 240000)
    psi = states[-1]
    assert np.sum(np.abs(psi[1::2]) ** 2) < 1e-4
    assert abs(psi0.conj() @ psi[0::2]) ** 2 > 1.0 - 1e-4


def test_snap_imparts_programmed_phases():
    params = PRESETS["z_rotation_20"].system_params()
    t_gate = 6.25
    target = math.pi / 8
    phases = {0: -target, 1: target, 2: target, 3: -target, 4: -target}
    amps = np.zeros(params.n_cut + 1, dtype=complex)
    amps[:5] = 1 / math.sqrt(5)
    _, states = snap_gate(params, phases, t_gate, amps, step=t_gate / 40000)
    ground = states[-1][0::2]
    for n in range(5):
        got = np.angle(ground[n] / amps[n])
        diff = (got - phases[n] + math.pi) % TWO_PI - math.pi
        assert abs(diff) < 1e-2, n


# ---------------------------------------------------------------------------
# Error transparency
# ---------------------------------------------------------------------------

def test_phase_gate_spectrum_is_loss_transparent():
    """The engineered energies of the phase-gate drive are equal on each
    code level and its single-photon-loss image, so a loss commutes with the
    accumulated phase."""
    preset = PRESETS["z_rotation_20"]
    e = spectrum_order4(preset.system_params(), preset.tones()).khz()
    for n in (20.0,):
        assert e[0] == pytest.approx(n, abs=0.5)
        assert e[3] == pytest.approx(n, abs=0.5)
        assert e[4] == pytest.approx(n, abs=0.5)
        assert e[1] == pytest.approx(-n, abs=0.5)
        assert e[2] == pytest.approx(-n, abs=0.5)


def test_two_cavity_spectrum_is_loss_transparent():
    """The joint engineered energy is unchanged by a single photon loss from
    either cavity on the code-space support."""
    params = cphase_two_cavity_params()
    specs = {
        "qubit_a": PRESETS["cphase_cavity_a"].drive_spec(),
        "qubit_b": PRESETS["cphase_cavity_b"].drive_spec(),
        "qubit_c": PRESETS["cphase_joint"].drive_spec(),
    }
    joint, _ = two_cavity_spectrum(params, specs)
    e = {k: 1e3 * v for k, v in joint.energies.items()}
    code = (0, 2, 4)
    for na in (2, 4):
        for nb in code:
            assert e[(na, nb)] == pytest.approx(e[(na - 1, nb)], abs=0.5)
    for nb in (2, 4):
        for na in code:
            assert e[(na, nb)] == pytest.approx(e[(na, nb - 1)], abs=0.5)


def test_loss_at_stroboscopic_times_recovered(loss_report):
    baseline = loss_report.scalars["fidelity_no_loss"]
    assert loss_report.scalars["worst_fidelity_stroboscopic"] >= \
        baseline - 1e-3


@pytest.mark.xfail(
    strict=True,
    reason="a loss that lands mid-period hits the drive-dressed state and "
    "scatters O(drive/detuning) amplitude out of the code space, costing a "
    "few tenths of a percent; only losses at multiples of the micromotion "
    "period are fully recovered",
)
def test_loss_at_arbitrary_times_recovered(loss_report):
    baseline = loss_report.scalars["fidelity_no_loss"]
    assert loss_report.scalars["worst_fidelity_with_loss"] >= baseline - 1e-3


# ---------------------------------------------------------------------------
# Noise monotonicity
# ---------------------------------------------------------------------------

def test_cphase_noise_only_hurts(cphase_report):
    assert cphase_report.scalars["fidelity"] >= \
        cphase_report.scalars["fidelity_relaxation"]


def test_kerr_revival_without_drive():
    """Bare self-Kerr evolution dephases the cat far from the code state at
    intermediate times; the engineered drive is what holds it in place."""
    from pnd.qcore import cat_state

    preset = PRESETS["kerr_cancel"]
    params = preset.system_params()
    psi0 = cat_state(math.sqrt(2.0), "even", params.n_cut,
                     leak_tol=1e-2).amplitudes
    k = params.kerr  # MHz
    n = np.arange(params.n_cut + 1)
    # Diagonal phases of the undriven nonlinearity.
    t_half = 0.25 / k  # quarter of the revival time pi / (2 pi K)
    phases = np.exp(1j * TWO_PI * k / 2.0 * n * (n - 1) * t_half)
    fid_mid = abs(psi0.conj() @ (phases * psi0)) ** 2
    assert fid_mid < 0.8
    t_revival = 1.0 / k
    phases = np.exp(1j * TWO_PI * k / 2.0 * n * (n - 1) * t_revival)
    fid_rev = abs(psi0.conj() @ (phases * psi0)) ** 2
    assert fid_rev == pytest.approx(1.0, abs=1e-10)
