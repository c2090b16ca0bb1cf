"""Reference drive parameter sets with tabulated target and engineered spectra.

Each preset bundles a dispersive parameter set, one drive tone per Fock level
(detunings as exact rational multiples of chi, amplitudes as fractions of chi),
the target spectrum, and the engineered spectrum achieved by those drives
(both in kHz). These serve as regression anchors for the spectrum evaluators,
the optimizer, and the experiment suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .models import DriveSpec, DriveTone, SystemParams, TwoCavityParams

F = Fraction


@dataclass(frozen=True)
class DrivePreset:
    name: str
    chi: float  # MHz
    kerr_khz: float
    chi_prime_khz: float
    deltas: tuple[Fraction, ...]  # per Fock level, in units of chi
    omegas_over_chi: tuple[float, ...]
    target_khz: tuple[float, ...]
    engineered_khz: tuple[float, ...]

    @property
    def n_levels(self) -> int:
        return len(self.deltas)

    def system_params(self, n_cut: int | None = None) -> SystemParams:
        return SystemParams(
            chi=self.chi,
            kerr=self.kerr_khz * 1e-3,
            chi_prime=self.chi_prime_khz * 1e-3,
            n_cut=self.n_levels - 1 if n_cut is None else n_cut,
        )

    def tones(self) -> tuple[DriveTone, ...]:
        return tuple(
            DriveTone(m=n, omega_amp=self.omegas_over_chi[n] * self.chi,
                      delta=self.deltas[n])
            for n in range(self.n_levels)
        )

    def drive_spec(self, envelope=None) -> DriveSpec:
        from .models import Abrupt

        return DriveSpec(tones=self.tones(),
                         envelope=Abrupt() if envelope is None else envelope)


PRESETS: dict[str, DrivePreset] = {}


def _add(preset: DrivePreset) -> None:
    PRESETS[preset.name] = preset


_add(DrivePreset(
    name="three_photon_05",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(1, 2), F(1, 2), F(1, 2), F(1, 2), F(1, 2), F(1, 4), F(1, 2)),
    omegas_over_chi=(0.0946, 0.0694, 0.0637, 0.0640, 0.0661, 0.0704, 0.0859),
    target_khz=(0, 0, 0, 3, 12, 30, 60),
    engineered_khz=(0, 0, 0, 3, 12, 30, 60),
))

_add(DrivePreset(
    name="three_photon_10",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(1, 2), F(1, 2), F(1, 2), F(1, 2), F(1, 4), F(1, 2), F(1, 2)),
    omegas_over_chi=(0.1422, 0.1025, 0.0935, 0.0917, 0.0995, 0.1337, 0.1172),
    target_khz=(0, 0, 0, 6, 24, 60, 120),
    engineered_khz=(0, 0, -1, 8, 25, 61, 122),
))

_add(DrivePreset(
    name="parity_20",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(-1, 4), F(1, 4), F(-1, 2), F(1, 4), F(-1, 4), F(1, 4), F(-1, 2)),
    omegas_over_chi=(0.00682, 0.0568, 0.0553, 0.0349, 0.0427, 0.0427, 0.0786),
    target_khz=(-20, 20, -20, 20, -20, 20, -20),
    engineered_khz=(-20, 20, -20, 20, -20, 20, -20),
))

_add(DrivePreset(
    name="parity_40",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(-1, 2), F(1, 4), F(-1, 2), F(1, 4), F(-1, 4), F(1, 2), F(-1, 4)),
    omegas_over_chi=(0.0232, 0.0799, 0.0826, 0.0463, 0.0469, 0.0820, 0.0816),
    target_khz=(-40, 40, -40, 40, -40, 40, -40),
    engineered_khz=(-40.5, 40.5, -40.5, 40.5, -40.5, 40.5, -40.5),
))

_add(DrivePreset(
    name="z_rotation_20",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(1, 2), F(-1, 2), F(-1, 2), F(1, 4), F(1, 2), F(-1, 4), F(-1, 2)),
    omegas_over_chi=(0.0862, 0.0531, 0.0753, 0.0240, 0.0554, 0.0489, 0.0893),
    target_khz=(20, -20, -20, 20, 20, -20, -20),
    engineered_khz=(20, -20, -20, 20, 20, -20, -20),
))

_add(DrivePreset(
    name="z_rotation_40",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(1, 2), F(-1, 4), F(-1, 2), F(1, 4), F(1, 4), F(-1, 4), F(-1, 2)),
    omegas_over_chi=(0.1166, 0.0600, -0.0961, 0.0308, 0.0629, 0.0678, 0.1214),
    target_khz=(40, -40, -40, 40, 40, -40, -40),
    engineered_khz=(40, -41, -41, 40, 40, -41, -40),
))

_add(DrivePreset(
    name="kerr_cancel",
    chi=2.0, kerr_khz=3.0, chi_prime_khz=6.0,
    deltas=(F(1, 2), F(1, 2), F(1, 2), F(1, 2), F(1, 2), F(1, 4), F(1, 4)),
    omegas_over_chi=(0.0883, 0.0658, 0.0635, 0.0639, 0.0620, 0.0534, 0.0606),
    target_khz=(0, 0, 3, 9, 18, 30, 45),
    engineered_khz=(0, 0, 3, 9, 18, 30.25, 46.25),
))

_add(DrivePreset(
    name="z_rotation_kerr_cancel",
    chi=2.0, kerr_khz=3.0, chi_prime_khz=6.0,
    deltas=(F(1, 2), F(-1, 2), F(-1, 4), F(1, 2), F(1, 4), F(1, 2), F(1, 2)),
    omegas_over_chi=(0.0949, 0.0659, 0.0344, 0.0838, 0.0588, 0.0257, 0.0527),
    target_khz=(20, -20, -17, 29, 38, 10, 25),
    engineered_khz=(20, -20, -17, 29, 38, 9, 24),
))

_add(DrivePreset(
    name="cphase_cavity_a",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(1, 2), F(-1, 4), F(-1, 2), F(-1, 2), F(-1, 2)),
    omegas_over_chi=(0.0393, 0.0212, 0.0365, 0.0243, 0.0175),
    target_khz=(5, -5, -5, 5, 5),
    engineered_khz=(5, -5, -5, 5, 5),
))

_add(DrivePreset(
    name="cphase_cavity_b",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(1, 2), F(-1, 4), F(-1, 2), F(-1, 2), F(-1, 2)),
    omegas_over_chi=(0.0393, 0.0212, 0.0365, 0.0243, 0.0175),
    target_khz=(5, -5, -5, 5, 5),
    engineered_khz=(5, -5, -5, 5, 5),
))

_add(DrivePreset(
    name="cphase_joint",
    chi=2.56, kerr_khz=0.0, chi_prime_khz=0.0,
    deltas=(F(-1, 2), F(1, 4), F(1, 2), F(-1, 4), F(-1, 2), F(-1, 4), F(-1, 4),
            F(-1, 2), F(-1, 2)),
    omegas_over_chi=(0.0280, 0.0197, 0.0268, 0.0245, 0.0421, 0.0257, 0.00486,
                     0.0379, 0.0633),
    target_khz=(-10, 0, 0, -10, -10, 0, 0, -10, -10),
    engineered_khz=(-10, 0, 0, -10, -10, 0, 0, -10, -10),
))


def cphase_two_cavity_params() -> TwoCavityParams:
    return TwoCavityParams(chi_a=2.56, chi_b=2.56, chi_c=2.56,
                           n_cut_a=4, n_cut_b=4)
