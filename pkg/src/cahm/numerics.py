"""Dense complex linear algebra for small Hermitian systems.

Every operator in this package is an explicit dense matrix (dim <= 4096).
This module provides the shared primitives: validated Hermitian operators
and state vectors, a deterministic Hermitian eigendecomposition, spectral
time evolution exp(-iHt), and Kronecker products.  All values are immutable
after construction and every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative tolerance for H == H^dagger, scaled by max|H|.
HERMITICITY_RTOL = 1e-12
# Absolute tolerance on |sum |a_i|^2 - 1| for state vectors.
NORM_ATOL = 1e-10
# Eigenvalue gaps below DEGENERACY_RTOL * spectral_radius are treated as
# degenerate when fixing the eigenvector orientation.
DEGENERACY_RTOL = 1e-12
# Orthonormality tolerance for eigenvector matrices.
ORTHO_ATOL = 1e-10
# Per-vector eigen-residual tolerance, relative to the Frobenius norm of H.
RESIDUAL_RTOL = 1e-9

MAX_DIM = 4096


class ContractViolationError(ValueError):
    """An input or result violates a documented invariant."""


def _as_square_matrix(entries) -> np.ndarray:
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {m.shape}")
    if not 1 <= m.shape[0] <= MAX_DIM:
        raise ContractViolationError(f"dimension {m.shape[0]} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ContractViolationError("matrix entries must be finite")
    return m


@dataclass(frozen=True)
class HermitianOperator:
    """Dense complex matrix H with H = H^dagger within HERMITICITY_RTOL * max|H|."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square_matrix(self.matrix)
        scale = float(np.max(np.abs(m)))
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if scale > 0.0 and deviation > HERMITICITY_RTOL * scale:
            raise ContractViolationError(
                f"matrix is not Hermitian: max|H - H^dagger| = {deviation:.3e} "
                f"exceeds {HERMITICITY_RTOL:.0e} * max|H| = {HERMITICITY_RTOL * scale:.3e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector with sum |a_i|^2 = 1 within NORM_ATOL."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise ContractViolationError(f"expected a 1d amplitude vector, got shape {a.shape}")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ContractViolationError("amplitudes must be finite")
        norm_sq = float(np.sum(np.abs(a) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ContractViolationError(
                f"state not normalized: sum |a_i|^2 = {norm_sq!r} differs from 1 "
                f"by more than {NORM_ATOL:.0e}"
            )
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @staticmethod
    def basis(dim: int, index: int) -> "StateVector":
        """Computational basis state |index> in a dim-dimensional space."""
        if not 0 <= index < dim:
            raise ContractViolationError(f"basis index {index} outside 0..{dim - 1}")
        a = np.zeros(dim, dtype=np.complex128)
        a[index] = 1.0
        return StateVector(a)

    @staticmethod
    def normalized(amplitudes) -> "StateVector":
        """Rescale an arbitrary nonzero amplitude vector to unit norm."""
        a = np.asarray(amplitudes, dtype=np.complex128)
        n = float(np.linalg.norm(a))
        if n == 0.0 or not np.isfinite(n):
            raise ContractViolationError("cannot normalize a zero or non-finite vector")
        return StateVector(a / n)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (real, ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        w = np.array(self.eigenvalues, dtype=np.float64)
        v = np.array(self.eigenvectors, dtype=np.complex128)
        if w.ndim != 1 or v.ndim != 2 or v.shape != (w.size, w.size):
            raise ContractViolationError("inconsistent spectrum shapes")
        if np.any(np.diff(w) < -1e-12 * max(1.0, float(np.max(np.abs(w))))):
            raise ContractViolationError("eigenvalues must be ascending")
        gram = v.conj().T @ v
        if float(np.max(np.abs(gram - np.eye(w.size)))) > ORTHO_ATOL:
            raise ContractViolationError("eigenvector columns are not orthonormal")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def _canonical_subspace_basis(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the span of `block`.

    Column-pivoted Gram-Schmidt on the projector columns P e_0, P e_1, ...
    (largest residual norm first, ties broken by index order), so the result
    depends only on the subspace, not on the arbitrary orientation the
    eigensolver returned.
    """
    d, k = block.shape
    projector = block @ block.conj().T
    residual = projector.copy()
    chosen: list[np.ndarray] = []
    for _ in range(k):
        norms = np.linalg.norm(residual, axis=0)
        pick = int(np.argmax(norms))
        if norms[pick] < 1e-9:
            return block  # numerically defective projector; keep solver output
        u = residual[:, pick] / norms[pick]
        chosen.append(u)
        residual = residual - np.outer(u, u.conj() @ residual)
    return np.column_stack(chosen)


def _fix_column_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = v.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        mag = abs(col[i])
        if mag > 0.0:
            out[:, j] = col * (col[i].conjugate() / mag)
    return out


def eig_hermitian(op: HermitianOperator) -> Spectrum:
    """Full eigendecomposition of a Hermitian operator.

    Deterministic for identical input: eigenvalues ascending, eigenvectors
    within each (near-)degenerate cluster re-oriented by column-pivoted
    Gram-Schmidt in index order, and every column phase-fixed so that its
    largest entry is real positive.
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(op)
    h = 0.5 * (op.matrix + op.matrix.conj().T)
    w, v = np.linalg.eigh(h)

    scale = max(abs(float(w[0])), abs(float(w[-1])), np.finfo(float).tiny)
    tol = DEGENERACY_RTOL * scale
    start = 0
    v = v.copy()
    for i in range(1, w.size + 1):
        if i == w.size or w[i] - w[i - 1] > tol:
            if i - start > 1:
                v[:, start:i] = _canonical_subspace_basis(v[:, start:i])
            start = i
    v = _fix_column_phases(v)

    h_norm = float(np.linalg.norm(h))
    residual = float(np.max(np.linalg.norm(h @ v - v * w, axis=0)))
    if h_norm > 0.0 and residual > RESIDUAL_RTOL * h_norm:
        raise ContractViolationError(
            f"eigendecomposition residual {residual:.3e} exceeds "
            f"{RESIDUAL_RTOL:.0e} * ||H|| = {RESIDUAL_RTOL * h_norm:.3e}"
        )
    return Spectrum(w, v)


def evolve(op: HermitianOperator, t: float, psi0: StateVector) -> StateVector:
    """Apply U(t) = exp(-iHt) to psi0 through the spectral decomposition."""
    if op.dim != psi0.dim:
        raise ContractViolationError(f"dimension mismatch: H is {op.dim}, state is {psi0.dim}")
    s = eig_hermitian(op)
    c = s.eigenvectors.conj().T @ psi0.amplitudes
    amplitudes = s.eigenvectors @ (np.exp(-1j * s.eigenvalues * float(t)) * c)
    return StateVector(amplitudes)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square complex matrices (dim = dimA * dimB)."""
    am = a.matrix if isinstance(a, HermitianOperator) else np.asarray(a, dtype=np.complex128)
    bm = b.matrix if isinstance(b, HermitianOperator) else np.asarray(b, dtype=np.complex128)
    return np.kron(am, bm)


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)
