"""Bosonic code states and the single-photon-loss recovery channel.

The smallest binomial code stores a qubit in Fock states |0>, |2>, |4>:
logical zero (|0> + |4>)/sqrt(2), logical one |2>. A single photon loss maps
the code space to the odd-parity subspace span{|3>, |1>}, from which an
isometry restores the logical content.
"""

from __future__ import annotations

import math

import numpy as np

from .qcore import DensityMatrix, HilbertDims, QuantumState, single_dims

__all__ = [
    "kitten_logical_zero",
    "kitten_logical_one",
    "kitten_plus",
    "recovery_kraus",
    "kitten_recovery",
]


def kitten_logical_zero(n_cut: int, label: str = "cavity") -> QuantumState:
    if n_cut < 4:
        raise ValueError("logical zero needs n_cut >= 4")
    amps = np.zeros(n_cut + 1, dtype=complex)
    amps[0] = amps[4] = 1 / math.sqrt(2)
    return QuantumState(single_dims(label, n_cut + 1), amps)


def kitten_logical_one(n_cut: int, label: str = "cavity") -> QuantumState:
    if n_cut < 2:
        raise ValueError("logical one needs n_cut >= 2")
    amps = np.zeros(n_cut + 1, dtype=complex)
    amps[2] = 1.0
    return QuantumState(single_dims(label, n_cut + 1), amps)


def kitten_plus(n_cut: int, label: str = "cavity") -> QuantumState:
    amps = (kitten_logical_zero(n_cut, label).amplitudes
            + kitten_logical_one(n_cut, label).amplitudes) / math.sqrt(2)
    return QuantumState(single_dims(label, n_cut + 1), amps)


def recovery_kraus(n_cut: int) -> list[np.ndarray]:
    """Kraus operators of the photon-loss recovery channel on one cavity.

    * On the single-loss (odd) subspace: the isometry |3> -> logical zero,
      |1> -> logical one.
    * On the code space: identity (projector).
    * All remaining basis directions map incoherently to the top Fock state,
      acting as an orthogonal failure sink, which makes the map trace
      preserving on every input.
    """
    if n_cut < 4:
        raise ValueError("recovery needs n_cut >= 4")
    dim = n_cut + 1
    zero_l = kitten_logical_zero(n_cut).amplitudes
    one_l = kitten_logical_one(n_cut).amplitudes

    correct = np.zeros((dim, dim), dtype=complex)
    correct += np.outer(zero_l, _basis(dim, 3))
    correct += np.outer(one_l, _basis(dim, 1))

    keep = np.outer(zero_l, zero_l.conj()) + np.outer(one_l, one_l.conj())

    kraus = [correct, keep]
    handled = correct.conj().T @ correct + keep.conj().T @ keep
    # Remaining (failure) directions: eigenvectors of I - sum K'K with
    # eigenvalue one, each sent to the sink state |n_cut>.
    w, v = np.linalg.eigh(np.eye(dim) - handled)
    sink = _basis(dim, n_cut)
    for i in range(dim):
        if w[i] > 1e-12:
            kraus.append(math.sqrt(w[i]) * np.outer(sink, v[:, i].conj()))
    return kraus


def _basis(dim: int, k: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


def kitten_recovery(rho: DensityMatrix, cavity_label: str = "cavity") -> DensityMatrix:
    """Apply the recovery channel to one cavity factor of a density matrix."""
    labels = rho.dims.labels
    if cavity_label not in labels:
        raise KeyError(f"unknown subsystem {cavity_label!r}")
    dim_c = rho.dims.dim(cavity_label)
    kraus = recovery_kraus(dim_c - 1)
    mats = []
    for k in kraus:
        factors = []
        for lab, d in rho.dims.subsystems:
            factors.append(k if lab == cavity_label else np.eye(d, dtype=complex))
        full = factors[0]
        for f in factors[1:]:
            full = np.kron(full, f)
        mats.append(full)
    out = np.zeros_like(rho.matrix)
    for m in mats:
        out += m @ rho.matrix @ m.conj().T
    return DensityMatrix(rho.dims, out)
