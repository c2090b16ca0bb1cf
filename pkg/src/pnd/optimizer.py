"""Target spectra and seeded drive-parameter optimization.

The designer picks one tone per Fock level, assigns each tone a detuning
from a small rational menu, and solves the coupled perturbative spectrum
equations for the amplitudes, minimizing the total time-averaged ancilla
excitation over many random detuning assignments.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from .effective import (
    EngineeredSpectrum,
    ResonanceError,
    spectrum_order2,
    spectrum_order4,
)
from .models import Abrupt, DriveSpec, DriveTone, SystemParams

F = Fraction

__all__ = [
    "ThreePhoton",
    "Parity",
    "ZRotation",
    "KerrCancel",
    "CPhase",
    "Custom",
    "OptimizerConfig",
    "OptimizedDrive",
    "InfeasibleTargetError",
    "make_target",
    "solve_amplitudes",
    "optimize_drives",
]


class InfeasibleTargetError(ValueError):
    """Raised when no detuning assignment admits a within-tolerance solution."""


# ---------------------------------------------------------------------------
# Target spectra (all values in kHz)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThreePhoton:
    k3_khz: float
    n_max: int = 6


@dataclass(frozen=True)
class Parity:
    p_khz: float
    n_max: int = 6


@dataclass(frozen=True)
class ZRotation:
    g_khz: float
    d_n: int = 2
    n_max: int = 6


@dataclass(frozen=True)
class KerrCancel:
    k_khz: float
    n_max: int = 6


@dataclass(frozen=True)
class CPhase:
    g_khz: float
    d_na: int = 2
    d_nb: int = 2
    n_max_a: int = 4
    n_max_b: int = 4


@dataclass(frozen=True)
class Custom:
    energies_khz: tuple[float, ...]


TargetSpec = ThreePhoton | Parity | ZRotation | KerrCancel | CPhase | Custom


def _z_rotation_sign(n: int, d: int) -> int:
    """+1 on residues {0, d+1, ..., 2d-1}, -1 on residues {1, ..., d} (mod 2d)."""
    r = n % (2 * d)
    return 1 if (r == 0 or r > d) else -1


def make_target(spec: TargetSpec) -> dict:
    """Target energies in kHz: {n: E} or, for two-cavity phase gates, a dict of
    per-channel marginals {"qubit_a": {...}, "qubit_b": {...}, "qubit_c": {...}}."""
    if isinstance(spec, ThreePhoton):
        return {n: spec.k3_khz * n * (n - 1) * (n - 2) for n in range(spec.n_max + 1)}
    if isinstance(spec, Parity):
        return {n: spec.p_khz * (-1) ** (n + 1) for n in range(spec.n_max + 1)}
    if isinstance(spec, ZRotation):
        return {n: spec.g_khz * _z_rotation_sign(n, spec.d_n)
                for n in range(spec.n_max + 1)}
    if isinstance(spec, KerrCancel):
        return {n: spec.k_khz / 2.0 * n * (n - 1) for n in range(spec.n_max + 1)}
    if isinstance(spec, CPhase):
        g = spec.g_khz
        a = {n: g / 4.0 * _z_rotation_sign(n, spec.d_na)
             for n in range(spec.n_max_a + 1)}
        b = {n: g / 4.0 * _z_rotation_sign(n, spec.d_nb)
             for n in range(spec.n_max_b + 1)}
        period = spec.d_na + spec.d_nb
        d_min = min(spec.d_na, spec.d_nb)
        residues = {0} | {period - k for k in range(1, d_min)}
        c = {}
        for s in range(spec.n_max_a + spec.n_max_b + 1):
            c[s] = -g / 2.0 if (s % period) in residues else 0.0
        return {"qubit_a": a, "qubit_b": b, "qubit_c": c}
    if isinstance(spec, Custom):
        return {n: e for n, e in enumerate(spec.energies_khz)}
    raise TypeError(f"unknown target spec {spec!r}")


# ---------------------------------------------------------------------------
# Optimizer configuration and result
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    detuning_menu: tuple[Fraction, ...] = (F(1, 2), F(-1, 2), F(1, 4), F(-1, 4))
    n_assignments: int = 200
    seed: int = 0
    amp_bound: float = 0.2  # |Omega/chi|
    solver_tol_khz: float = 0.25
    include_order4: bool = True
    per_level_tol_khz: dict | None = None  # n -> tolerance override
    sign_prune_fraction: float = 0.3  # prune threshold relative to max |E_T|

    def __post_init__(self):
        if not self.detuning_menu:
            raise ValueError("empty detuning menu")
        for d in self.detuning_menu:
            if d == 0 or abs(d) > F(1, 2):
                raise ValueError(f"menu detuning {d} outside (0, 1/2]")

    def tolerance(self, n: int) -> float:
        if self.per_level_tol_khz and n in self.per_level_tol_khz:
            return self.per_level_tol_khz[n]
        return self.solver_tol_khz


@dataclass(frozen=True)
class OptimizedDrive:
    drive: DriveSpec
    achieved: EngineeredSpectrum
    objective: float  # sum_n p_{n,e}
    residual_khz: float
    assignment: tuple[Fraction, ...]

    def to_json_dict(self) -> dict:
        return {
            "tones": [
                {
                    "m": t.m,
                    "omega_re_over_chi": t.omega_amp.real / self.achieved.chi,
                    "omega_im_over_chi": t.omega_amp.imag / self.achieved.chi,
                    "delta_num": t.delta.numerator,
                    "delta_den": t.delta.denominator,
                }
                for t in self.drive.tones
            ],
            "achieved_khz": {str(n): 1e3 * e for n, e in
                             sorted(self.achieved.energies.items())},
            "objective": self.objective,
            "residual_khz": self.residual_khz,
        }


# ---------------------------------------------------------------------------
# Fast residual evaluation
# ---------------------------------------------------------------------------

class _SpectrumModel:
    """Vectorized order-2(+4) spectrum for a fixed detuning assignment."""

    def __init__(self, params: SystemParams, deltas: tuple[Fraction, ...],
                 include_order4: bool):
        self.params = params
        self.include_order4 = include_order4
        chi = params.chi
        m_count = len(deltas)
        levels = np.arange(m_count)
        d_mhz = np.array([float(x) * chi for x in deltas])
        self.denom = (
            levels[:, None] * chi - levels[None, :] * chi + d_mhz[None, :]
            - params.chi_prime * (levels * (levels - 1))[:, None] / 2.0
        )
        if np.min(np.abs(self.denom)) < chi / 100.0:
            raise ResonanceError("assignment produces a near-resonant denominator")
        cross = d_mhz[:, None] - d_mhz[None, :] - (levels[:, None] - levels[None, :]) * chi
        np.fill_diagonal(cross, np.inf)
        if np.min(np.abs(cross)) < chi / 100.0:
            raise ResonanceError("assignment produces a near-resonant tone pair")
        self.inv_cross = 1.0 / cross

        if include_order4:
            key = [deltas[m] - m for m in range(m_count)]
            quads = []
            for j1, j2, j3, j4 in itertools.product(range(m_count), repeat=4):
                if key[j1] + key[j3] != key[j2] + key[j4]:
                    continue
                distinct = len({j1, j2, j3, j4})
                if distinct == 4 or (j1 == j3 and distinct == 3) \
                        or (j2 == j4 and distinct == 3):
                    quads.append((j1, j2, j3, j4))
            if quads:
                q = np.array(quads)
                self.q1, self.q2, self.q3, self.q4 = q.T
                self.w3 = (
                    1.0 / (self.denom[:, self.q4] * self.denom[:, self.q1])
                    * self.inv_cross[self.q1, self.q2]
                )
            else:
                self.q1 = None

    def energies_khz(self, omegas: np.ndarray) -> np.ndarray:
        amps2 = omegas**2
        inv_d = 1.0 / self.denom
        inv_d2 = inv_d**2
        e = inv_d @ amps2
        if self.include_order4:
            s1 = inv_d @ amps2
            s2 = inv_d2 @ amps2
            term1 = s1 * s2
            term2 = inv_d2 @ (amps2 * (self.inv_cross @ amps2))
            e = e - term1 + term2
            if self.q1 is not None:
                prods = omegas[self.q1] * omegas[self.q2] \
                    * omegas[self.q3] * omegas[self.q4]
                e = e + self.w3 @ prods
        return e * 1e3

    def objective(self, omegas: np.ndarray) -> float:
        return float(np.sum((1.0 / self.denom**2) @ omegas**2))


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def _validate_target(target_khz: dict, params: SystemParams) -> np.ndarray:
    levels = sorted(target_khz)
    if levels != list(range(len(levels))):
        raise ValueError("target must cover contiguous levels 0..n_max")
    arr = np.array([target_khz[n] for n in levels], dtype=float)
    bound = params.chi * 1e3 / 8.0
    if np.max(np.abs(arr)) > bound:
        raise InfeasibleTargetError(
            f"target strength {np.max(np.abs(arr)):.3g} kHz exceeds bound "
            f"chi/8 = {bound:.3g} kHz"
        )
    return arr


def solve_amplitudes(
    assignment: tuple[Fraction, ...],
    target_khz: dict,
    params: SystemParams,
    config: OptimizerConfig,
) -> OptimizedDrive | None:
    """Solve the coupled spectrum equations for one detuning assignment.

    Returns None when the solver fails to reach the per-level tolerances.
    """
    target = _validate_target(target_khz, params)
    n_levels = len(target)
    if len(assignment) != n_levels:
        raise ValueError("assignment length must match target levels")
    if not np.any(target):
        tones = tuple(DriveTone(m=n, omega_amp=0.0, delta=assignment[n])
                      for n in range(n_levels))
        achieved = EngineeredSpectrum(
            energies={n: 0.0 for n in range(n_levels)}, order=4, chi=params.chi)
        return OptimizedDrive(DriveSpec(tones=tones), achieved, 0.0, 0.0,
                              tuple(assignment))
    try:
        model = _SpectrumModel(params, tuple(assignment), config.include_order4)
    except ResonanceError:
        return None

    chi = params.chi
    x0 = np.sqrt(np.maximum(np.abs(target) * 1e-3
                            * np.abs([float(a) * chi for a in assignment]), 1e-8))
    bound = config.amp_bound * chi

    def residual(x):
        return model.energies_khz(x) - target

    sol = least_squares(residual, x0, bounds=(-bound, bound), method="trf",
                        xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=400)
    res = np.abs(residual(sol.x))
    tols = np.array([config.tolerance(n) for n in range(n_levels)])
    if np.any(res > tols):
        return None
    omegas = sol.x
    tones = tuple(
        DriveTone(m=n, omega_amp=float(omegas[n]), delta=assignment[n])
        for n in range(n_levels)
    )
    energies = model.energies_khz(omegas) * 1e-3
    achieved = EngineeredSpectrum(
        energies={n: float(energies[n]) for n in range(n_levels)},
        order=4 if config.include_order4 else 2,
        chi=chi,
    )
    return OptimizedDrive(
        drive=DriveSpec(tones=tones),
        achieved=achieved,
        objective=model.objective(omegas),
        residual_khz=float(np.max(res)),
        assignment=tuple(assignment),
    )


def _sample_assignments(
    target: np.ndarray, config: OptimizerConfig, rng: np.random.Generator
) -> list[tuple[Fraction, ...]]:
    menu = list(config.detuning_menu)
    n_levels = len(target)
    scale = np.max(np.abs(target))
    sign_locked = np.abs(target) >= config.sign_prune_fraction * scale
    seen = set()
    out = []
    for _ in range(config.n_assignments):
        assignment = []
        for n in range(n_levels):
            if sign_locked[n]:
                choices = [d for d in menu if (d > 0) == (target[n] > 0)]
            else:
                choices = menu
            assignment.append(choices[int(rng.integers(len(choices)))])
        key = tuple(assignment)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def optimize_drives(
    target_khz: dict,
    params: SystemParams,
    config: OptimizerConfig,
) -> OptimizedDrive:
    """Best drive over seeded random detuning assignments, ranked by total
    ancilla excitation; deterministic for a fixed config."""
    target = _validate_target(target_khz, params)
    rng = np.random.default_rng(config.seed)
    assignments = _sample_assignments(target, config, rng)
    results = []
    failures = []
    for idx, assignment in enumerate(assignments):
        sol = solve_amplitudes(assignment, target_khz, params, config)
        if sol is None:
            failures.append((idx, assignment))
            continue
        results.append((sol.objective, sol.residual_khz,
                        tuple(str(a) for a in assignment), idx, sol))
    if not results:
        raise InfeasibleTargetError(
            f"no feasible assignment among {len(assignments)} tried "
            f"({len(failures)} solver failures)"
        )
    results.sort(key=lambda r: r[:3])
    return results[0][4]


def reference_objective(params: SystemParams, tones) -> float:
    """Total ancilla excitation of a given tone set, for benchmarking."""
    from .effective import qubit_excitation_prob

    n_max = len(tones) - 1
    return sum(
        qubit_excitation_prob(params, tuple(tones), n) for n in range(n_max + 1)
    )
