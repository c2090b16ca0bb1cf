"""Closed-form effective spectra, kick operators, excitation and dephasing rates.

This module works entirely in ordinary (cyclic) frequency units: every formula
here is a ratio of drive amplitudes and detunings, homogeneous of degree one,
so MHz in / MHz out with no 2*pi factors.

The engineered ground-manifold cavity energy for a tone set {(m, Omega_m,
delta_m)} is, to second order,

    E_n = sum_m |Omega_m|^2 / D(n, m),
    D(n, m) = (n - m) chi + delta_m - chi' n(n-1)/2,

and the fourth-order correction consists of three sums (see spectrum_order4).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .models import (
    TWO_PI,
    DriveSpec,
    DriveTone,
    NoiseParams,
    SystemParams,
    TwoCavityParams,
)
from .qcore import CompositeOperator, HilbertDims, single_dims

__all__ = [
    "EngineeredSpectrum",
    "DephasingRates",
    "ResonanceError",
    "spectrum_order2",
    "spectrum_order4",
    "stroboscopic_spectrum",
    "micromotion_period",
    "qubit_excitation_prob",
    "kick_operators",
    "dephasing_rates",
    "two_cavity_spectrum",
]


class ResonanceError(ValueError):
    """A perturbative denominator fell below the resonance guard."""


@dataclass(frozen=True)
class EngineeredSpectrum:
    """Per-Fock-state engineered energies in MHz with provenance metadata."""

    energies: dict  # n -> E_n (MHz), or (n_a, n_b) -> E (MHz)
    order: int
    chi: float

    def as_array(self) -> np.ndarray:
        keys = sorted(self.energies)
        return np.array([self.energies[k] for k in keys])

    def khz(self) -> dict:
        return {k: 1e3 * v for k, v in self.energies.items()}


@dataclass(frozen=True)
class DephasingRates:
    """Pairwise coherence decay rates (MHz) and per-level excitation probabilities."""

    gamma: dict  # (n1, n2) -> rate MHz
    p_excited: dict  # n -> probability


# ---------------------------------------------------------------------------
# Denominators and guards
# ---------------------------------------------------------------------------

def _denominator(n: int, tone: DriveTone, params: SystemParams) -> float:
    return (n - tone.m) * params.chi + tone.delta_mhz(params.chi) \
        - params.chi_prime * n * (n - 1) / 2.0


def _guard_denominators(
    tones: tuple[DriveTone, ...], params: SystemParams, n_max: int, guard: float
) -> np.ndarray:
    """Return the (n, tone) denominator table, raising on near-resonance."""
    d = np.empty((n_max + 1, len(tones)))
    for n in range(n_max + 1):
        for j, tone in enumerate(tones):
            val = _denominator(n, tone, params)
            if abs(val) < guard:
                raise ResonanceError(
                    f"near-resonant denominator {val:.4g} MHz at (n={n}, m={tone.m})"
                )
            d[n, j] = val
    return d


def _cross_detuning(t1: DriveTone, t2: DriveTone, chi: float) -> float:
    return t1.delta_mhz(chi) - t2.delta_mhz(chi) - (t1.m - t2.m) * chi


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def spectrum_order2(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    n_max: int | None = None,
    guard: float | None = None,
) -> EngineeredSpectrum:
    """Second-order engineered spectrum E_n = sum_m |Omega_m|^2 / D(n, m)."""
    if n_max is None:
        n_max = params.n_cut
    if guard is None:
        guard = params.chi / 100.0
    d = _guard_denominators(tones, params, n_max, guard)
    amps2 = np.array([abs(t.omega_amp) ** 2 for t in tones])
    energies = {n: float(np.sum(amps2 / d[n])) for n in range(n_max + 1)}
    return EngineeredSpectrum(energies=energies, order=2, chi=params.chi)


def _order4_correction(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    d: np.ndarray,
    n: int,
) -> float:
    """Fourth-order energy correction for Fock level n.

    Three sums over tone indices: a pair sum over squared amplitudes with a
    cubic denominator, a cross-detuning pair sum, and a phase-matched quadruple
    sum restricted to resonant index patterns.
    """
    chi = params.chi
    m_count = len(tones)
    amps = np.array([t.omega_amp for t in tones], dtype=complex)
    amps2 = np.abs(amps) ** 2

    term1 = float(np.sum(np.outer(amps2, amps2) / np.outer(d[n], d[n] ** 2)))

    term2 = 0.0
    for j1, j2 in itertools.permutations(range(m_count), 2):
        term2 += amps2[j1] * amps2[j2] / (
            d[n, j1] ** 2 * _cross_detuning(tones[j1], tones[j2], chi)
        )

    term3 = 0.0 + 0j
    # Resonant quadruples: the summed drive frequencies of indices (1, 3) must
    # match those of (2, 4) exactly, checked over exact rationals.
    key = [t.delta - t.m for t in tones]
    for j1, j2, j3, j4 in itertools.product(range(m_count), repeat=4):
        if key[j1] + key[j3] != key[j2] + key[j4]:
            continue
        distinct = len({j1, j2, j3, j4})
        ok = (
            distinct == 4
            or (j1 == j3 and distinct == 3)
            or (j2 == j4 and distinct == 3)
        )
        if not ok:
            continue
        term3 += (
            amps[j1] * np.conj(amps[j2]) * amps[j3] * np.conj(amps[j4])
            / (d[n, j4] * _cross_detuning(tones[j1], tones[j2], chi) * d[n, j1])
        )

    return -term1 + term2 + float(term3.real)


def spectrum_order4(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    n_max: int | None = None,
    guard: float | None = None,
) -> EngineeredSpectrum:
    """Engineered spectrum including the fourth-order corrections."""
    if n_max is None:
        n_max = params.n_cut
    if guard is None:
        guard = params.chi / 100.0
    d = _guard_denominators(tones, params, n_max, guard)
    for t1, t2 in itertools.permutations(tones, 2):
        if abs(_cross_detuning(t1, t2, params.chi)) < guard:
            raise ResonanceError(
                f"near-resonant cross detuning between tones m={t1.m} and m={t2.m}"
            )
    base = spectrum_order2(params, tones, n_max=n_max, guard=guard)
    energies = {
        n: base.energies[n] + _order4_correction(params, tones, d, n)
        for n in range(n_max + 1)
    }
    return EngineeredSpectrum(energies=energies, order=4, chi=params.chi)


def stroboscopic_spectrum(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    n_max: int | None = None,
    steps: int = 60000,
) -> EngineeredSpectrum:
    """Non-perturbative engineered spectrum from one-period propagators.

    For each Fock level the driven two-level problem is integrated over one
    micromotion period; the eigenphase of the ground-like branch of the
    propagator gives the exact engineered energy (all orders). The branch of
    the eigenphase is chosen nearest the second-order estimate; the ambiguity
    (one over the period) is orders of magnitude larger than any plausible
    correction.
    """
    if n_max is None:
        n_max = params.n_cut
    t_m = micromotion_period(tones, params.chi)
    ns = np.arange(n_max + 1)
    freqs = np.array([
        [(n - t.m) * params.chi + t.delta_mhz(params.chi) for t in tones]
        for n in ns
    ])
    # Common per-level phase shift from chi' moved onto the excited-state
    # diagonal so the Hamiltonian stays exactly periodic.
    phi = TWO_PI * params.chi_prime * ns * (ns - 1) / 2.0
    amps = TWO_PI * np.array([t.omega_amp for t in tones], dtype=complex)
    h = t_m / steps
    u = np.broadcast_to(np.eye(2, dtype=complex), (n_max + 1, 2, 2)).copy()

    def rhs(t: float, mat: np.ndarray) -> np.ndarray:
        c = np.exp(1j * TWO_PI * freqs * t) @ amps
        hmat = np.zeros((n_max + 1, 2, 2), dtype=complex)
        hmat[:, 0, 1] = c
        hmat[:, 1, 0] = np.conj(c)
        hmat[:, 1, 1] = phi
        return -1j * np.einsum("nij,njk->nik", hmat, mat)

    t = 0.0
    for _ in range(steps):
        k1 = rhs(t, u)
        k2 = rhs(t + h / 2, u + h / 2 * k1)
        k3 = rhs(t + h / 2, u + h / 2 * k2)
        k4 = rhs(t + h, u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h

    order2 = spectrum_order2(params, tones, n_max=n_max)
    energies = {}
    for n in ns:
        w, v = np.linalg.eig(u[n])
        j = int(np.argmax(np.abs(v[0, :])))
        phase = float(np.angle(w[j] / abs(w[j])))
        guess = -TWO_PI * order2.energies[n] * t_m
        k = round((guess - phase) / TWO_PI)
        energies[int(n)] = -(phase + TWO_PI * k) / (TWO_PI * t_m)
    return EngineeredSpectrum(energies=energies, order=0, chi=params.chi)


# ---------------------------------------------------------------------------
# Micromotion period
# ---------------------------------------------------------------------------

def micromotion_period(tones: tuple[DriveTone, ...], chi: float) -> float:
    """Period (us) after which all drive phases rewind: 1 / GCD({delta_m}, chi).

    Computed over exact rationals: the GCD of {delta_m/chi} and 1, times chi.
    """
    ratios = [t.delta for t in tones] + [Fraction(1)]
    g = ratios[0]
    for r in ratios[1:]:
        g = Fraction(math.gcd(g.numerator * r.denominator, r.numerator * g.denominator),
                     g.denominator * r.denominator)
    gcd_mhz = float(g) * chi
    return 1.0 / gcd_mhz


# ---------------------------------------------------------------------------
# Excitation probability and kick operators
# ---------------------------------------------------------------------------

def qubit_excitation_prob(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    n: int,
    include_initial_kick: bool = False,
    guard: float | None = None,
) -> float:
    """Time-averaged ancilla excited-state probability for cavity level n.

    The first sum is the steady micromotion contribution; the second (optional)
    sum is the extra oscillation seeded by switching the drive on abruptly,
    removed by a smooth ramp.
    """
    if guard is None:
        guard = params.chi / 100.0
    d = _guard_denominators(tones, params, n, guard)[n]
    ratios = np.array([t.omega_amp for t in tones], dtype=complex) / d
    p = float(np.sum(np.abs(ratios) ** 2))
    if include_initial_kick:
        p += float(np.abs(np.sum(ratios)) ** 2)
    return p


def kick_operators(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    t: float,
    guard: float | None = None,
) -> dict[str, CompositeOperator]:
    """First- and second-order micromotion generators at time t.

    G1 couples |n, g> and |n, e| with a phase-evolving coefficient per tone;
    G2 is the diagonal-in-qubit pair correction requiring two distinct tones.
    Both are Hermitian by construction (X - X†)/i structure, returned as dense
    operators on the cavity-qubit space.
    """
    if guard is None:
        guard = params.chi / 100.0
    n_cut = params.n_cut
    d = _guard_denominators(tones, params, n_cut, guard)
    dims = HilbertDims((("cavity", n_cut + 1), ("qubit", 2)))
    dim = dims.total_dim

    g1 = np.zeros((dim, dim), dtype=complex)
    for n in range(n_cut + 1):
        coeff = 0.0 + 0j
        for j, tone in enumerate(tones):
            freq = _denominator(n, tone, params)
            coeff += tone.omega_amp * np.exp(1j * TWO_PI * freq * t) / (1j * d[n, j])
        g1[2 * n, 2 * n + 1] = coeff
    g1 = g1 + g1.conj().T

    g2 = np.zeros((dim, dim), dtype=complex)
    for n in range(n_cut + 1):
        val = 0.0
        for j1, j2 in itertools.permutations(range(len(tones)), 2):
            t1, t2 = tones[j1], tones[j2]
            cross = _cross_detuning(t1, t2, params.chi)
            if abs(cross) < guard:
                raise ResonanceError(
                    f"near-resonant tone pair m={t1.m}, m={t2.m} in kick expansion"
                )
            z = t1.omega_amp * np.conj(t2.omega_amp) * np.exp(1j * TWO_PI * cross * t)
            # (z - conj(z)) / (2i) = Im(z): each pair term is real.
            val -= z.imag / (d[n, j1] * cross)
        # Diagonal in the qubit: -val on |n, g>, +val on |n, e>.
        g2[2 * n, 2 * n] = -val
        g2[2 * n + 1, 2 * n + 1] = val
    return {
        "G1": CompositeOperator(dims, g1),
        "G2": CompositeOperator(dims, g2),
    }


# ---------------------------------------------------------------------------
# Dephasing rates
# ---------------------------------------------------------------------------

def dephasing_rates(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    noise: NoiseParams,
    n_max: int | None = None,
    include_initial_kick: bool = False,
    guard: float | None = None,
) -> DephasingRates:
    """Ancilla-noise-induced cavity coherence decay rates.

    gamma_{n1 n2} = (gamma_phi + gamma_q)/2 * (p_{n1,e} + p_{n2,e})
                    - gamma_phi * S(n1)* S(n2),
    with S(n) = sum_m Omega_m / D(n, m).
    """
    if n_max is None:
        n_max = params.n_cut
    if guard is None:
        guard = params.chi / 100.0
    d = _guard_denominators(tones, params, n_max, guard)
    amps = np.array([t.omega_amp for t in tones], dtype=complex)
    p = {
        n: qubit_excitation_prob(params, tones, n,
                                 include_initial_kick=include_initial_kick,
                                 guard=guard)
        for n in range(n_max + 1)
    }
    s = {n: complex(np.sum(amps / d[n])) for n in range(n_max + 1)}
    gamma = {}
    for n1 in range(n_max + 1):
        for n2 in range(n_max + 1):
            val = (noise.gamma_phi + noise.gamma_q) / 2.0 * (p[n1] + p[n2]) \
                - noise.gamma_phi * (np.conj(s[n1]) * s[n2]).real
            gamma[(n1, n2)] = float(val)
    return DephasingRates(gamma=gamma, p_excited=p)


def effective_cavity_jump_operators(
    params: SystemParams,
    tones: tuple[DriveTone, ...],
    noise: NoiseParams,
    n_max: int | None = None,
) -> list[tuple[np.ndarray, float]]:
    """Analytic per-tone cavity-only jump operators implied by ancilla noise.

    Each ancilla relaxation/dephasing channel, filtered through the
    off-resonant drive response, acts on the cavity as a diagonal jump
    operator sum_n (Omega_m / D(n, m)) |n><n|. Returned as (matrix, rate MHz)
    pairs for direct comparison against full-model simulations.
    """
    if n_max is None:
        n_max = params.n_cut
    d = _guard_denominators(tones, params, n_max, params.chi / 100.0)
    ops = []
    for rate in (noise.gamma_q, noise.gamma_phi):
        if rate == 0.0:
            continue
        for j, tone in enumerate(tones):
            diag = np.array([tone.omega_amp / d[n, j] for n in range(n_max + 1)])
            ops.append((np.diag(diag), rate))
    return ops


# ---------------------------------------------------------------------------
# Two-cavity spectra
# ---------------------------------------------------------------------------

def _channel_params(chi: float, n_top: int) -> SystemParams:
    return SystemParams(chi=chi, n_cut=n_top)


def two_cavity_spectrum(
    params: TwoCavityParams,
    specs: dict[str, DriveSpec],
    order: int = 4,
) -> tuple[EngineeredSpectrum, dict[str, EngineeredSpectrum]]:
    """Joint spectrum E_{n_a n_b} = E_a(n_a) + E_b(n_b) + E_c(n_a + n_b).

    Returns the (n_a, n_b) grid spectrum and the three per-channel marginals.
    The shared-ancilla channel c sees the joint photon number n_a + n_b.
    """
    evaluate = spectrum_order4 if order == 4 else spectrum_order2
    n_joint = params.n_cut_a + params.n_cut_b
    marginals = {}
    channel_tops = {"qubit_a": params.n_cut_a, "qubit_b": params.n_cut_b,
                    "qubit_c": n_joint}
    chi_map = {"qubit_a": params.chi_a, "qubit_b": params.chi_b,
               "qubit_c": params.chi_c}
    for label, top in channel_tops.items():
        if label in specs:
            try:
                marginals[label] = evaluate(
                    _channel_params(chi_map[label], top), specs[label].tones,
                    n_max=top,
                )
            except ResonanceError as exc:
                raise ResonanceError(f"channel {label}: {exc}") from exc
        else:
            marginals[label] = EngineeredSpectrum(
                energies={n: 0.0 for n in range(top + 1)}, order=order,
                chi=chi_map[label],
            )
    grid = {}
    for na in range(params.n_cut_a + 1):
        for nb in range(params.n_cut_b + 1):
            grid[(na, nb)] = (
                marginals["qubit_a"].energies[na]
                + marginals["qubit_b"].energies[nb]
                + marginals["qubit_c"].energies[na + nb]
            )
    joint = EngineeredSpectrum(energies=grid, order=order, chi=params.chi_a)
    return joint, marginals
