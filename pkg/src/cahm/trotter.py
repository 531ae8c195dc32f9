"""Qubit circuits for Trotterized array evolution, with seeded shot sampling.

One first-order step for the driven blockaded pair is
exp(-i dt H) ~ RX(Omega dt) on each qubit, then P(Delta dt) on each qubit,
then CP(-V0 dt) on the interacting pair, where RX(l) = exp(-i l X / 2),
P(phi) = diag(1, e^{i phi}) and CP(phi) = diag(1, 1, 1, e^{i phi}).
Qubit 0 is the most significant bit of the statevector index; |g> = 0,
|r> = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import StateVector

MAX_QUBITS = 12

GATE_KINDS = ("RX", "P", "CP")


def rx_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(0.5 * angle), math.sin(0.5 * angle)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def p_matrix(angle: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * angle)]], dtype=np.complex128)


def cp_matrix(angle: float) -> np.ndarray:
    m = np.eye(4, dtype=np.complex128)
    m[3, 3] = np.exp(1j * angle)
    return m


@dataclass(frozen=True)
class Gate:
    """A single RX / P / CP gate acting on one or two qubits."""

    kind: str
    qubits: tuple[int, ...]
    angle: float

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        expected = 2 if self.kind == "CP" else 1
        if len(qubits) != expected or len(set(qubits)) != expected:
            raise ValueError(f"{self.kind} acts on {expected} distinct qubit(s), got {qubits}")
        if not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")

    def matrix(self) -> np.ndarray:
        if self.kind == "RX":
            return rx_matrix(self.angle)
        if self.kind == "P":
            return p_matrix(self.angle)
        return cp_matrix(self.angle)


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on n_qubits <= 12."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}")
        gates = tuple(self.gates)
        for g in gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate qubit {q} outside 0..{self.n_qubits - 1}")
        object.__setattr__(self, "gates", gates)

    def to_json_obj(self) -> list:
        return [
            {"gate": g.kind, "q": list(g.qubits), "angle": float(g.angle)} for g in self.gates
        ]

    @staticmethod
    def from_json_obj(n_qubits: int, obj: list) -> "Circuit":
        gates = tuple(Gate(d["gate"], tuple(d["q"]), float(d["angle"])) for d in obj)
        return Circuit(n_qubits=n_qubits, gates=gates)


def trotter_step(
    n_qubits: int,
    omega: float,
    dt: float,
    detunings,
    pair_couplings: dict,
) -> Circuit:
    """One first-order step for a driven array: RX layer, P layer, CP layer.

    detunings: per-qubit detuning (the P angle is detuning * dt);
    pair_couplings: {(i, j): V} producing CP(-V * dt) on each listed pair.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    detunings = list(detunings)
    if len(detunings) != n_qubits:
        raise ValueError("need one detuning per qubit")
    gates = [Gate("RX", (q,), omega * dt) for q in range(n_qubits)]
    gates += [Gate("P", (q,), detunings[q] * dt) for q in range(n_qubits)]
    gates += [Gate("CP", (min(i, j), max(i, j)), -v * dt) for (i, j), v in pair_couplings.items()]
    return Circuit(n_qubits=n_qubits, gates=tuple(gates))


def trotter_step_h2r(omega: float, delta: float, v0: float, dt: float) -> Circuit:
    """One step for the two-atom Hamiltonian (both qubits detuned by Delta)."""
    return trotter_step(2, omega, dt, [delta, delta], {(0, 1): v0})


def trotter_step_h4r(
    omega: float,
    delta: float,
    v0: float,
    v1: float,
    v2: float,
    dt: float,
) -> Circuit:
    """One step for two coupled pairs (4 qubits, all-to-all phase couplings)."""
    couplings = {(0, 1): v0, (2, 3): v0, (0, 2): v1, (1, 3): v1, (0, 3): v2, (1, 2): v2}
    return trotter_step(4, omega, dt, [delta] * 4, couplings)


def repeat_circuit(step: Circuit, n_steps: int) -> Circuit:
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    return Circuit(n_qubits=step.n_qubits, gates=step.gates * n_steps)


def _apply_single(state: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    psi = state.reshape([2] * n)
    psi = np.tensordot(m, psi, axes=([1], [q]))
    return np.moveaxis(psi, 0, q).reshape(-1)


def apply_circuit(circuit: Circuit, psi0: StateVector) -> StateVector:
    """Sequential statevector application of every gate."""
    dim = 1 << circuit.n_qubits
    if psi0.dim != dim:
        raise ValueError(f"state dimension {psi0.dim} does not match {circuit.n_qubits} qubits")
    state = psi0.amplitudes.astype(np.complex128, copy=True)
    n = circuit.n_qubits
    for g in circuit.gates:
        if g.kind == "CP":
            # Diagonal gate: phase the amplitudes with both qubits excited.
            i, j = g.qubits
            psi = state.reshape([2] * n)
            idx = [slice(None)] * n
            idx[i] = 1
            idx[j] = 1
            psi[tuple(idx)] *= np.exp(1j * g.angle)
            state = psi.reshape(-1)
        else:
            state = _apply_single(state, g.matrix(), g.qubits[0], n)
    return StateVector(state)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full unitary of the circuit (intended for small n_qubits)."""
    dim = 1 << circuit.n_qubits
    u = np.eye(dim, dtype=np.complex128)
    for k in range(dim):
        u[:, k] = apply_circuit(circuit, StateVector.basis(dim, k)).amplitudes
    return u


@dataclass(frozen=True)
class ShotResult:
    """Measurement counts per bitstring from a seeded multinomial draw."""

    counts: dict
    shots: int
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts must sum to the number of shots")

    def frequency(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots

    def to_json_obj(self) -> dict:
        return {
            "counts": {k: int(v) for k, v in self.counts.items()},
            "shots": int(self.shots),
            "seed": int(self.seed),
        }


def sample_shots(psi: StateVector, shots: int, seed: int) -> ShotResult:
    """Multinomial sampling of |amplitude|^2.

    Uses numpy's PCG64 generator seeded with `seed`; identical
    (psi, shots, seed) always reproduce identical counts.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    probs = np.abs(psi.amplitudes) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    n_bits = max(1, (psi.dim - 1).bit_length())
    counts = {
        format(b, f"0{n_bits}b"): int(k) for b, k in enumerate(draws) if k > 0
    }
    return ShotResult(counts=counts, shots=shots, seed=seed)
