import numpy as np
import pytest

from cahm import (
    ContractViolationError,
    HermitianOperator,
    StateVector,
    build_h1t,
    eig_hermitian,
    evolve,
    kron,
)
from cahm.numerics import identity
from cahm.target_models import SPIN1, TargetCouplings, op_lz

from helpers import expm_taylor, random_hermitian


def test_eig_diagonal():
    s = eig_hermitian(HermitianOperator(np.diag([1.0, 0.0, -1.0]).astype(complex)))
    assert np.allclose(s.eigenvalues, [-1.0, 0.0, 1.0])


def test_eig_even_block_closed_form():
    # 2x2 charge-even block at U=1, X=0.5: eigenvalues (1 -+ sqrt(3))/4.
    u, x = 1.0, 0.5
    block = np.array([[0.0, -x / np.sqrt(2)], [-x / np.sqrt(2), u / 2]], dtype=complex)
    s = eig_hermitian(HermitianOperator(block))
    expected = [(1 - np.sqrt(3)) / 4, (1 + np.sqrt(3)) / 4]
    assert np.allclose(s.eigenvalues, expected, atol=1e-14)


def test_eig_identity_degenerate():
    s = eig_hermitian(HermitianOperator(np.eye(3, dtype=complex)))
    assert np.allclose(s.eigenvalues, [1.0, 1.0, 1.0])
    assert np.allclose(s.eigenvectors.conj().T @ s.eigenvectors, np.eye(3), atol=1e-14)
    # Canonical orientation of a full degenerate subspace is the identity.
    assert np.allclose(s.eigenvectors, np.eye(3), atol=1e-14)


def test_eig_deterministic_and_orientation_stable():
    rng = np.random.default_rng(7)
    h = random_hermitian(rng, 12)
    # Force a degenerate cluster: H -> H with two equal eigenvalues.
    w, v = np.linalg.eigh(h)
    w[3] = w[4] = 0.5
    h = HermitianOperator(v @ np.diag(w) @ v.conj().T)
    s1 = eig_hermitian(h)
    s2 = eig_hermitian(h)
    assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
    assert np.array_equal(s1.eigenvectors, s2.eigenvectors)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolationError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    with pytest.raises(ContractViolationError):
        HermitianOperator(np.zeros((2, 3), dtype=complex))


def test_spectral_reconstruction_and_residuals():
    rng = np.random.default_rng(11)
    for dim in (2, 3, 5, 8, 16, 33, 64):
        h = random_hermitian(rng, dim, scale=2.0)
        s = eig_hermitian(HermitianOperator(h))
        rebuilt = s.eigenvectors @ np.diag(s.eigenvalues) @ s.eigenvectors.conj().T
        assert np.linalg.norm(rebuilt - h) <= 1e-9 * np.linalg.norm(h)
        residual = np.max(np.linalg.norm(h @ s.eigenvectors - s.eigenvectors * s.eigenvalues, axis=0))
        assert residual <= 1e-9 * np.linalg.norm(h)
        gram = s.eigenvectors.conj().T @ s.eigenvectors
        assert np.max(np.abs(gram - np.eye(dim))) <= 1e-10


def test_evolve_t0_and_diagonal_phase():
    h = HermitianOperator(np.diag([0.3, -1.2, 2.0]).astype(complex))
    psi0 = StateVector.normalized([1.0, 1.0j, -0.5])
    assert np.allclose(evolve(h, 0.0, psi0).amplitudes, psi0.amplitudes, atol=1e-14)
    basis1 = StateVector.basis(3, 1)
    out = evolve(h, 2.5, basis1)
    assert abs(out.amplitudes[1] - np.exp(-1j * (-1.2) * 2.5)) < 1e-12
    assert abs(np.abs(out.amplitudes[1]) ** 2 - 1.0) < 1e-12


def test_evolve_matches_taylor_expm_oracle():
    rng = np.random.default_rng(23)
    h1t = build_h1t(TargetCouplings(u=1.0, x=0.5))
    cases = [h1t.matrix] + [random_hermitian(rng, d) for d in (2, 3, 4, 8, 9, 16)]
    for m in cases:
        h = HermitianOperator(m)
        psi0 = StateVector.normalized(rng.normal(size=h.dim) + 1j * rng.normal(size=h.dim))
        for t in (0.7, np.pi):
            expected = expm_taylor(-1j * m * t) @ psi0.amplitudes
            got = evolve(h, t, psi0).amplitudes
            assert np.max(np.abs(got - expected)) <= 1e-9


def test_evolve_unitarity_random():
    rng = np.random.default_rng(31)
    for dim in (2, 5, 16, 33, 64):
        h = HermitianOperator(random_hermitian(rng, dim, scale=1.5))
        psi = StateVector.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))
        for _ in range(3):
            t = rng.uniform(0.0, 10.0)
            out = evolve(h, t, psi)
            assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) <= 1e-10


def test_evolve_composition():
    rng = np.random.default_rng(43)
    for dim in (3, 8, 16):
        h = HermitianOperator(random_hermitian(rng, dim))
        psi = StateVector.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))
        t1, t2 = rng.uniform(0, 5, size=2)
        once = evolve(h, t1 + t2, psi)
        twice = evolve(h, t2, evolve(h, t1, psi))
        assert np.max(np.abs(once.amplitudes - twice.amplitudes)) <= 1e-9


def test_evolve_dimension_mismatch():
    h = HermitianOperator(np.eye(3, dtype=complex))
    with pytest.raises(ContractViolationError):
        evolve(h, 1.0, StateVector.basis(4, 0))


def test_kron_identities():
    assert np.array_equal(kron(identity(2), identity(3)), identity(6))
    lz = op_lz(SPIN1).matrix
    total = kron(lz, identity(3)) + kron(identity(3), lz)
    idx = 3 * 0 + 2  # |m_L=1, m_R=-1>
    assert total[idx, idx] == 0.0
    diff = kron(lz, identity(3)) - kron(identity(3), lz)
    assert (diff @ diff)[idx, idx] == 4.0


def test_statevector_contracts():
    with pytest.raises(ContractViolationError):
        StateVector(np.array([1.0, 1.0], dtype=complex))
    v = StateVector.normalized([3.0, 4.0])
    assert abs(np.sum(np.abs(v.amplitudes) ** 2) - 1.0) < 1e-15
    with pytest.raises(ContractViolationError):
        StateVector.basis(3, 5)
