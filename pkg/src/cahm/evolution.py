"""Transition-probability traces, time rescaling and agreement scoring.

A trace holds P_f(t) = |<f| exp(-iHt) |psi0>|^2 for a set of labeled final
states on an ascending time grid.  Traces from a target chain and from a
simulator array share labels, so they can be compared directly or after a
multiplicative rescaling of the simulator time axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import HermitianOperator, StateVector, eig_hermitian

# Complete-basis probability series must sum to 1 within this tolerance.
COMPLETENESS_ATOL = 1e-9


@dataclass(frozen=True)
class EvolutionTrace:
    """Sampled times and labeled transition probabilities."""

    times: np.ndarray
    series: dict
    system_tag: str = ""

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64)
        if t.ndim != 1 or t.size == 0 or not np.all(np.isfinite(t)):
            raise ValueError("times must be a finite 1d array")
        if np.any(np.diff(t) < 0):
            raise ValueError("times must be ascending")
        clean = {}
        for label, values in self.series.items():
            v = np.array(values, dtype=np.float64)
            if v.shape != t.shape:
                raise ValueError(f"series {label!r} length does not match the time grid")
            if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-9):
                raise ValueError(f"series {label!r} has entries outside [0, 1]")
            v.setflags(write=False)
            clean[str(label)] = v
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "series", clean)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.series)

    def to_csv_text(self, digits: int = 12) -> str:
        """CSV with header t,label1,label2,...; fixed significant digits, LF endings."""
        fmt = f"{{:.{digits}g}}"
        lines = [",".join(["t", *self.series])]
        for k, t in enumerate(self.times):
            row = [fmt.format(t)] + [fmt.format(v[k]) for v in self.series.values()]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "system_tag": self.system_tag,
            "times": [float(t) for t in self.times],
            "series": {label: [float(p) for p in v] for label, v in self.series.items()},
        }


@dataclass(frozen=True)
class TraceComparison:
    """Deviation summary between two traces on their common grid."""

    max_abs_dev: float
    rms: float
    per_label: dict = field(default_factory=dict)
    time_window: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.max_abs_dev < 0 or self.rms < 0:
            raise ValueError("deviations must be nonnegative")
        if self.rms > self.max_abs_dev + 1e-12:
            raise ValueError("rms cannot exceed the maximum deviation")

    def to_json_obj(self) -> dict:
        return {
            "max_abs_dev": float(self.max_abs_dev),
            "rms": float(self.rms),
            "per_label": {
                label: {k: float(x) for k, x in d.items()} for label, d in self.per_label.items()
            },
            "time_window": [float(self.time_window[0]), float(self.time_window[1])],
        }


def _spectral_amplitudes(op, psi0, final_states, times):
    """<f| exp(-iHt) |psi0> for all finals and times, via one eigendecomposition."""
    spec = eig_hermitian(op)
    c = spec.eigenvectors.conj().T @ psi0.amplitudes
    w = np.vstack([f.amplitudes.conj() @ spec.eigenvectors for f in final_states])
    phases = np.exp(-1j * np.outer(spec.eigenvalues, np.asarray(times, dtype=np.float64)))
    return w @ (phases * c[:, None])


def trace(
    op: HermitianOperator,
    psi0: StateVector,
    finals: list[tuple[str, StateVector]],
    times,
    system_tag: str = "",
) -> EvolutionTrace:
    """Transition probabilities |<f|U(t)|psi0>|^2 for each labeled final state."""
    times = np.asarray(times, dtype=np.float64)
    for label, f in finals:
        if f.dim != op.dim:
            raise ValueError(f"final state {label!r} dimension {f.dim} does not match H ({op.dim})")
    if psi0.dim != op.dim:
        raise ValueError(f"initial state dimension {psi0.dim} does not match H ({op.dim})")
    amps = _spectral_amplitudes(op, psi0, [f for _, f in finals], times)
    probs = np.abs(amps) ** 2
    return EvolutionTrace(
        times=times,
        series={label: probs[i] for i, (label, _) in enumerate(finals)},
        system_tag=system_tag,
    )


def state_probabilities(op: HermitianOperator, psi0: StateVector, times) -> np.ndarray:
    """Full basis-state probability matrix |psi_b(t)|^2 with shape (dim, n_times)."""
    if psi0.dim != op.dim:
        raise ValueError("initial state dimension does not match H")
    spec = eig_hermitian(op)
    c = spec.eigenvectors.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(spec.eigenvalues, np.asarray(times, dtype=np.float64)))
    psi = spec.eigenvectors @ (phases * c[:, None])
    return np.abs(psi) ** 2


def simulator_trace(
    op: HermitianOperator,
    psi0: StateVector,
    observables: list[tuple[str, StateVector]],
    physical_indices,
    times,
    system_tag: str = "",
) -> EvolutionTrace:
    """Observable probabilities plus a 'leakage' series.

    Leakage aggregates the probability on every basis state outside
    `physical_indices` (the encoded spin subspace).
    """
    times = np.asarray(times, dtype=np.float64)
    tr = trace(op, psi0, observables, times, system_tag)
    probs = state_probabilities(op, psi0, times)
    outside = [b for b in range(op.dim) if b not in set(physical_indices)]
    series = dict(tr.series)
    series["leakage"] = probs[outside].sum(axis=0) if outside else np.zeros_like(times)
    return EvolutionTrace(times=times, series=series, system_tag=system_tag)


def complete_basis_finals(dim: int, labels=None) -> list[tuple[str, StateVector]]:
    """One final state per basis vector; default labels are the indices as bitstrings."""
    if labels is None:
        n_bits = max(1, (dim - 1).bit_length())
        labels = [format(b, f"0{n_bits}b") for b in range(dim)]
    return [(labels[b], StateVector.basis(dim, b)) for b in range(dim)]


def one_spin_finals() -> list[tuple[str, StateVector]]:
    """The three m-basis states of a single spin-1, labeled m=1, m=0, m=-1."""
    return [(f"m={m}", StateVector.basis(3, i)) for i, m in enumerate((1, 0, -1))]


def symmetric_state_two_spin() -> StateVector:
    """(|0,1> + |0,-1> + |1,0> + |-1,0>) / 2 in the 9-state two-spin basis."""
    a = np.zeros(9, dtype=np.complex128)
    for ml, mr in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        a[3 * (1 - ml) + (1 - mr)] = 0.5
    return StateVector(a)


def two_spin_finals() -> list[tuple[str, StateVector]]:
    """|0,0> and the symmetric one-excitation combination, labeled 00 and S."""
    return [("00", StateVector.basis(9, 4)), ("S", symmetric_state_two_spin())]


def blockade_leakage(tr: EvolutionTrace, physical_labels) -> float:
    """Largest total probability outside the physical labels of a complete trace."""
    physical = set(physical_labels)
    missing = physical - set(tr.series)
    if missing:
        raise ValueError(f"physical labels {sorted(missing)} not present in the trace")
    total = np.sum(list(tr.series.values()), axis=0)
    if float(np.max(np.abs(total - 1.0))) > 1e-6:
        raise ValueError("blockade_leakage requires a complete-basis trace (series must sum to 1)")
    outside = [v for label, v in tr.series.items() if label not in physical]
    if not outside:
        return 0.0
    return float(np.max(np.sum(outside, axis=0)))


def compare(
    target: EvolutionTrace,
    sim: EvolutionTrace,
    rescale_k: float | None = None,
) -> TraceComparison:
    """Deviations between shared labels, optionally rescaling the simulator time.

    With a rescale factor K the simulator series are read at t/K (linear
    interpolation on the simulator grid); target times whose rescaled image
    falls outside the simulator grid are dropped.
    """
    labels = [label for label in target.series if label in sim.series]
    if not labels:
        raise ValueError("traces share no labels")
    k = 1.0 if rescale_k is None else float(rescale_k)
    if not k > 0:
        raise ValueError(f"rescale factor must be positive, got {rescale_k!r}")

    source = target.times / k
    lo, hi = sim.times[0], sim.times[-1]
    span = max(hi - lo, 1.0)
    mask = (source >= lo - 1e-12 * span) & (source <= hi + 1e-12 * span)
    if not np.any(mask):
        raise ValueError("no overlap between the target grid and the rescaled simulator grid")
    common_t = target.times[mask]
    source = np.clip(source[mask], lo, hi)

    per_label = {}
    devs = []
    for label in labels:
        sim_vals = np.interp(source, sim.times, sim.series[label])
        d = np.abs(target.series[label][mask] - sim_vals)
        per_label[label] = {
            "max_abs_dev": float(np.max(d)),
            "rms": float(np.sqrt(np.mean(d**2))),
        }
        devs.append(d)
    all_d = np.concatenate(devs)
    return TraceComparison(
        max_abs_dev=float(np.max(all_d)),
        rms=float(np.sqrt(np.mean(all_d**2))),
        per_label=per_label,
        time_window=(float(common_t[0]), float(common_t[-1])),
    )
