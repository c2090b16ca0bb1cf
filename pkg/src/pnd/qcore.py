"""Dense linear algebra and state primitives for small cavity-qubit Hilbert spaces.

Conventions:
  * Operators are dense complex numpy matrices wrapped with subsystem metadata.
  * Hamiltonian-valued operators carry angular frequency units (rad/us).
  * Cavity subsystems are Fock-truncated at ``n_cut`` (dimension ``n_cut + 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm


@dataclass(frozen=True)
class HilbertDims:
    """Ordered subsystem labels and dimensions of a composite Hilbert space."""

    subsystems: tuple[tuple[str, int], ...]

    @property
    def total_dim(self) -> int:
        out = 1
        for _, d in self.subsystems:
            out *= d
        return out

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.subsystems)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    def dim(self, label: str) -> int:
        for lab, d in self.subsystems:
            if lab == label:
                return d
        raise KeyError(f"unknown subsystem label {label!r}")

    def index(self, label: str) -> int:
        for i, (lab, _) in enumerate(self.subsystems):
            if lab == label:
                return i
        raise KeyError(f"unknown subsystem label {label!r}")


def single_dims(label: str, dim: int) -> HilbertDims:
    return HilbertDims(((label, dim),))


@dataclass(frozen=True)
class CompositeOperator:
    """Dense operator on a composite Hilbert space."""

    dims: HilbertDims
    matrix: np.ndarray

    def __post_init__(self):
        n = self.dims.total_dim
        if self.matrix.shape != (n, n):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match total dim {n}"
            )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.linalg.norm(self.matrix)))
        return bool(np.linalg.norm(self.matrix - self.matrix.conj().T) <= tol * scale)

    def dagger(self) -> "CompositeOperator":
        return CompositeOperator(self.dims, self.matrix.conj().T.copy())

    def __matmul__(self, other: "CompositeOperator") -> "CompositeOperator":
        if self.dims != other.dims:
            raise ValueError("operator dims mismatch")
        return CompositeOperator(self.dims, self.matrix @ other.matrix)

    def __add__(self, other: "CompositeOperator") -> "CompositeOperator":
        if self.dims != other.dims:
            raise ValueError("operator dims mismatch")
        return CompositeOperator(self.dims, self.matrix + other.matrix)

    def __mul__(self, scalar: complex) -> "CompositeOperator":
        return CompositeOperator(self.dims, scalar * self.matrix)

    __rmul__ = __mul__


@dataclass(frozen=True)
class QuantumState:
    """Pure state amplitudes over a composite Hilbert space."""

    dims: HilbertDims
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (self.dims.total_dim,):
            raise ValueError("amplitude vector length does not match dims")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QuantumState":
        return QuantumState(self.dims, self.amplitudes / self.norm())

    def density_matrix(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(self.dims, np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator over a composite Hilbert space."""

    dims: HilbertDims
    matrix: np.ndarray

    def __post_init__(self):
        n = self.dims.total_dim
        if self.matrix.shape != (n, n):
            raise ValueError("density matrix shape does not match dims")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)))


# ---------------------------------------------------------------------------
# Operator builders
# ---------------------------------------------------------------------------

def annihilation(n_cut: int, label: str = "cavity") -> CompositeOperator:
    """Truncated bosonic lowering operator on a Fock space of dimension n_cut+1."""
    if n_cut < 1:
        raise ValueError("n_cut must be >= 1")
    dim = n_cut + 1
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(n)
    return CompositeOperator(single_dims(label, dim), a)


def number_operator(n_cut: int, label: str = "cavity") -> CompositeOperator:
    dim = n_cut + 1
    return CompositeOperator(single_dims(label, dim), np.diag(np.arange(dim, dtype=complex)))


def fock_projector(n: int, n_cut: int, label: str = "cavity") -> CompositeOperator:
    dim = n_cut + 1
    m = np.zeros((dim, dim), dtype=complex)
    m[n, n] = 1.0
    return CompositeOperator(single_dims(label, dim), m)


def qubit_identity(label: str = "qubit") -> CompositeOperator:
    return CompositeOperator(single_dims(label, 2), np.eye(2, dtype=complex))


def sigma_minus(label: str = "qubit") -> CompositeOperator:
    """Lowering operator |g><e| in the (g, e) basis ordering."""
    m = np.zeros((2, 2), dtype=complex)
    m[0, 1] = 1.0
    return CompositeOperator(single_dims(label, 2), m)


def sigma_z(label: str = "qubit") -> CompositeOperator:
    """Diagonal Pauli operator with <g|sz|g> = -1, <e|sz|e> = +1."""
    return CompositeOperator(single_dims(label, 2), np.diag([-1.0 + 0j, 1.0 + 0j]))


def excited_projector(label: str = "qubit") -> CompositeOperator:
    return CompositeOperator(single_dims(label, 2), np.diag([0.0 + 0j, 1.0 + 0j]))


def identity(dims: HilbertDims) -> CompositeOperator:
    return CompositeOperator(dims, np.eye(dims.total_dim, dtype=complex))


def tensor(ops: list[CompositeOperator]) -> CompositeOperator:
    """Kronecker product in declared order; subsystem labels are concatenated."""
    if not ops:
        raise ValueError("empty operator list")
    labels: list[tuple[str, int]] = []
    mat = np.array([[1.0 + 0j]])
    for op in ops:
        for lab, d in op.dims.subsystems:
            if lab in [x for x, _ in labels]:
                raise ValueError(f"duplicate subsystem label {lab!r} in tensor product")
            labels.append((lab, d))
        mat = np.kron(mat, op.matrix)
    return CompositeOperator(HilbertDims(tuple(labels)), mat)


def embed(op: CompositeOperator, dims: HilbertDims) -> CompositeOperator:
    """Embed an operator acting on a subset of subsystems into a larger space."""
    factors = []
    op_labels = op.dims.labels
    if len(op_labels) != 1:
        # Embed each factor of a multi-subsystem operator only if they are
        # contiguous and in order; general case handled by permutation below.
        pass
    mats = {}
    for lab in op_labels:
        mats[lab] = None
    if len(op_labels) == 1:
        lab = op_labels[0]
        for label, d in dims.subsystems:
            if label == lab:
                factors.append(op.matrix)
            else:
                factors.append(np.eye(d, dtype=complex))
        mat = factors[0]
        for f in factors[1:]:
            mat = np.kron(mat, f)
        return CompositeOperator(dims, mat)
    raise NotImplementedError("embed supports single-subsystem operators; use tensor")


# ---------------------------------------------------------------------------
# State builders
# ---------------------------------------------------------------------------

def basis_state(dims: HilbertDims, occupation: dict[str, int]) -> QuantumState:
    """Product basis state |occupation[label]> over every subsystem."""
    vec = np.array([1.0 + 0j])
    for label, d in dims.subsystems:
        idx = occupation.get(label, 0)
        if not 0 <= idx < d:
            raise ValueError(f"occupation {idx} out of range for {label!r} (dim {d})")
        e = np.zeros(d, dtype=complex)
        e[idx] = 1.0
        vec = np.kron(vec, e)
    return QuantumState(dims, vec)


def product_state(parts: list[tuple[HilbertDims, np.ndarray]]) -> QuantumState:
    vec = np.array([1.0 + 0j])
    labels: list[tuple[str, int]] = []
    for dims, amps in parts:
        labels.extend(dims.subsystems)
        vec = np.kron(vec, amps)
    return QuantumState(HilbertDims(tuple(labels)), vec)


def coherent_amplitudes(alpha: complex, n_cut: int) -> np.ndarray:
    n = np.arange(n_cut + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, n_cut + 1)))))
    amps = np.exp(-(abs(alpha) ** 2) / 2) * np.power(alpha + 0j, n) / np.exp(log_fact / 2)
    return amps


def cat_state(alpha: complex, parity: str, n_cut: int,
              label: str = "cavity", leak_tol: float = 1e-4) -> QuantumState:
    """Normalized even/odd superposition of coherent states in truncated Fock space."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    plus = coherent_amplitudes(alpha, n_cut)
    minus = coherent_amplitudes(-alpha, n_cut)
    amps = plus + minus if parity == "even" else plus - minus
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("degenerate odd cat at alpha=0")
    # Estimate truncation leakage from the untruncated tail of |alpha|.
    tail = 1.0 - float(np.sum(np.abs(coherent_amplitudes(alpha, max(n_cut, 40))[: n_cut + 1]) ** 2))
    if tail > leak_tol:
        raise ValueError(
            f"Fock weight above n_cut={n_cut} is {tail:.2e} (> {leak_tol:.0e}); raise n_cut"
        )
    return QuantumState(single_dims(label, n_cut + 1), amps / norm)


# ---------------------------------------------------------------------------
# Reductions and measures
# ---------------------------------------------------------------------------

def partial_trace(rho: DensityMatrix, keep: list[str]) -> DensityMatrix:
    """Trace out all subsystems not listed in ``keep`` (order of kept preserved)."""
    labels = rho.dims.labels
    for lab in keep:
        if lab not in labels:
            raise KeyError(f"unknown subsystem label {lab!r}")
    shape = rho.dims.shape
    k = len(shape)
    t = rho.matrix.reshape(shape + shape)
    # Trace out, highest axis index first so positions stay valid.
    remaining = list(labels)
    for lab in sorted((l for l in labels if l not in keep),
                      key=lambda l: -labels.index(l)):
        i = remaining.index(lab)
        t = np.trace(t, axis1=i, axis2=i + len(remaining))
        remaining.pop(i)
    # Reorder remaining subsystems to match the requested keep order.
    perm = [remaining.index(lab) for lab in keep]
    nk = len(perm)
    t = np.transpose(t, perm + [p + nk for p in perm])
    dims_out = HilbertDims(tuple((lab, rho.dims.dim(lab)) for lab in keep))
    n = dims_out.total_dim
    return DensityMatrix(dims_out, t.reshape(n, n))


def state_fidelity(rho: DensityMatrix | QuantumState, psi: QuantumState) -> float:
    """Overlap <psi|rho|psi> for a density matrix (or pure state) against a pure state."""
    if isinstance(rho, QuantumState):
        rho = rho.density_matrix()
    if rho.dims.total_dim != psi.dims.total_dim:
        raise ValueError("dimension mismatch between rho and psi")
    val = psi.amplitudes.conj() @ rho.matrix @ psi.amplitudes
    if abs(val.imag) > 1e-9:
        raise ValueError(f"fidelity has non-negligible imaginary part {val.imag:.2e}")
    return float(np.clip(val.real, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Wigner function
# ---------------------------------------------------------------------------

def displacement_matrix(alpha: complex, n_cut: int) -> np.ndarray:
    a = annihilation(n_cut).matrix
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def wigner(rho: DensityMatrix, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Wigner function W(x, p) via the displaced-parity formula.

    Convention: x = (a + a†)/√2, alpha = (x + i p)/√2, normalized so that
    the vacuum gives W(0, 0) = 1/pi and the grid integral of W is 1.
    """
    if len(rho.dims.subsystems) != 1:
        raise ValueError("wigner expects a single-cavity density matrix")
    dim = rho.dims.total_dim
    parity = np.diag((-1.0 + 0j) ** np.arange(dim))
    out = np.zeros((len(xs), len(ps)))
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            alpha = (x + 1j * p) / math.sqrt(2)
            d = displacement_matrix(alpha, dim - 1)
            val = np.trace(d.conj().T @ rho.matrix @ d @ parity)
            out[i, j] = val.real / math.pi
    return out
