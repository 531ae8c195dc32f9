"""Rydberg-array Hamiltonians from atom geometry.

Atoms are two-level systems |g>, |r| at fixed 2D positions with repulsive
1/r^6 pair interactions

    H = (Omega/2) sum_i (|g_i><r_i| + |r_i><g_i|) - Delta sum_i n_i
        - Delta0 sum_{i in designated} n_i + sum_{i<j} V_ij n_i n_j.

The 2^n product basis orders atom 0 as the most significant bit with |g> = 0
and |r> = 1.  Standard layouts: a vertical pair, three equidistant atoms on a
vertical line, and mirrored two-column ladders whose reflection symmetry
realizes charge conjugation (spin sign flip) geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import HermitianOperator, StateVector

MAX_ATOMS = 12

# Spin value -> excited atom bit pattern, one column, top atom first.
_SINGLE_MAPS = {
    "two-atom": {2: {1: 0b10, 0: 0b00, -1: 0b01}},
    "three-atom": {3: {1: 0b100, 0: 0b010, -1: 0b001}},
}

_MIRROR_PERMS = {
    "two-atom": (1, 0),
    "three-atom": (2, 1, 0),
    "four-atom": (1, 0, 3, 2),
    "six-atom": (2, 1, 0, 5, 4, 3),
}


def pair_interaction(scale: float, r: float) -> float:
    """Van der Waals pair energy scale / r^6; `scale` is the energy at unit distance."""
    if not r > 0:
        raise ValueError(f"pair distance must be positive, got {r!r}")
    return scale / r**6


@dataclass(frozen=True)
class AtomGeometry:
    """Fixed 2D atom positions plus the interaction energy at unit distance."""

    positions: np.ndarray
    interaction_scale: float

    def __post_init__(self):
        p = np.array(self.positions, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
            raise ValueError(f"positions must be an (n, 2) array, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or not math.isfinite(self.interaction_scale):
            raise ValueError("positions and interaction scale must be finite")
        for i in range(p.shape[0]):
            for j in range(i + 1, p.shape[0]):
                if np.hypot(*(p[i] - p[j])) == 0.0:
                    raise ValueError(f"atoms {i} and {j} coincide")
        p.setflags(write=False)
        object.__setattr__(self, "positions", p)

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    def distance(self, i: int, j: int) -> float:
        d = self.positions[i] - self.positions[j]
        return float(np.hypot(d[0], d[1]))

    def couplings(self) -> dict[tuple[int, int], float]:
        """Geometry-derived V_ij for every pair i < j."""
        n = self.n_atoms
        return {
            (i, j): pair_interaction(self.interaction_scale, self.distance(i, j))
            for i in range(n)
            for j in range(i + 1, n)
        }


@dataclass(frozen=True)
class RydbergParams:
    """Drive and detuning parameters; pair_overrides replace geometric V_ij."""

    omega: float
    delta: float
    delta0: float = 0.0
    delta0_atoms: tuple[int, ...] = ()
    pair_overrides: dict[tuple[int, int], float] | None = None

    def __post_init__(self):
        for name in ("omega", "delta", "delta0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "delta0_atoms", tuple(int(i) for i in self.delta0_atoms))
        if self.pair_overrides is not None:
            normalized = {}
            for (i, j), v in self.pair_overrides.items():
                if i == j:
                    raise ValueError(f"pair override ({i}, {j}) is not a pair")
                if not math.isfinite(v):
                    raise ValueError(f"pair override ({i}, {j}) must be finite")
                normalized[(min(i, j), max(i, j))] = float(v)
            object.__setattr__(self, "pair_overrides", normalized)


def build_rydberg_h(geom: AtomGeometry, params: RydbergParams) -> HermitianOperator:
    """Dense 2^n Hamiltonian of the driven interacting array."""
    n = geom.n_atoms
    if n > MAX_ATOMS:
        raise ValueError(f"{n} atoms exceed the supported maximum {MAX_ATOMS}")
    for i in params.delta0_atoms:
        if not 0 <= i < n:
            raise ValueError(f"delta0 atom index {i} outside 0..{n - 1}")
    couplings = geom.couplings()
    if params.pair_overrides:
        for (i, j) in params.pair_overrides:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"pair override ({i}, {j}) outside 0..{n - 1}")
        couplings.update(params.pair_overrides)

    dim = 1 << n
    h = np.zeros((dim, dim), dtype=np.complex128)
    extra = set(params.delta0_atoms)
    for b in range(dim):
        bits = [(b >> (n - 1 - i)) & 1 for i in range(n)]
        energy = -params.delta * sum(bits) - params.delta0 * sum(bits[i] for i in extra)
        for (i, j), v in couplings.items():
            if bits[i] and bits[j]:
                energy += v
        h[b, b] = energy
        for i in range(n):
            h[b, b ^ (1 << (n - 1 - i))] += 0.5 * params.omega
    return HermitianOperator(h)


def geometry_two_atom(a_r: float, scale: float) -> AtomGeometry:
    """Two atoms on a vertical line, spacing a_r; one pair with V = scale/a_r^6."""
    if not a_r > 0:
        raise ValueError("a_r must be positive")
    return AtomGeometry(np.array([[0.0, a_r], [0.0, 0.0]]), scale)


def geometry_three_atom_line(a_r: float, scale: float) -> AtomGeometry:
    """Three equidistant atoms on a vertical line: nearest V0, outer pair V0/64."""
    if not a_r > 0:
        raise ValueError("a_r must be positive")
    return AtomGeometry(np.array([[0.0, 2 * a_r], [0.0, a_r], [0.0, 0.0]]), scale)


def geometry_mirrored_ladder(n_per_rung: int, a_r: float, a_s: float, scale: float) -> AtomGeometry:
    """Two vertical columns (spacing a_r within, a_s across).

    The right column represents the mirrored spin, so facing atoms carry
    opposite m.  With rho = a_r/a_s the cross couplings are
    V1 = V0 rho^6 (facing), V2 = V0 (rho/sqrt(1+rho^2))^6 (one row apart) and,
    for three rows, V3 = V0 (rho/sqrt(1+4 rho^2))^6 (two rows apart),
    where V0 = scale/a_r^6 is the in-column nearest-neighbor coupling.
    """
    if n_per_rung not in (2, 3):
        raise ValueError(f"n_per_rung must be 2 or 3, got {n_per_rung}")
    if not (a_r > 0 and a_s > 0):
        raise ValueError("a_r and a_s must be positive")
    ys = [a_r * (n_per_rung - 1 - row) for row in range(n_per_rung)]
    positions = [[0.0, y] for y in ys] + [[a_s, y] for y in ys]
    return AtomGeometry(np.array(positions), scale)


def ladder_cross_couplings(v0: float, rho: float, n_per_rung: int) -> dict[str, float]:
    """Cross-column couplings of a mirrored ladder as functions of rho = a_r/a_s."""
    if not 0 <= rho < 1:
        raise ValueError(f"rho must lie in [0, 1), got {rho!r}")
    out = {
        "v1": v0 * rho**6,
        "v2": v0 * (rho / math.sqrt(1.0 + rho**2)) ** 6 if rho else 0.0,
    }
    if n_per_rung == 3:
        out["v3"] = v0 * (rho / math.sqrt(1.0 + 4.0 * rho**2)) ** 6 if rho else 0.0
    return out


@dataclass(frozen=True)
class SpinAtomMap:
    """Injective map from spin labels to product-basis indices.

    Keys are m values (single spin) or (m_left, m_right) tuples (two spins).
    """

    n_atoms: int
    encoding: str
    spin_states: dict

    def __post_init__(self):
        if self.encoding not in ("two-atom", "three-atom"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        values = list(self.spin_states.values())
        if len(set(values)) != len(values):
            raise ValueError("spin state map must be injective")
        for v in values:
            if not 0 <= v < (1 << self.n_atoms):
                raise ValueError(f"mapped index {v} outside the {self.n_atoms}-atom basis")

    @property
    def is_two_spin(self) -> bool:
        return any(isinstance(k, tuple) for k in self.spin_states)

    def spin_basis_order(self) -> list:
        """Spin basis labels in canonical (descending-m, left-major) order."""
        if self.is_two_spin:
            return [(ml, mr) for ml in (1, 0, -1) for mr in (1, 0, -1)]
        return [1, 0, -1]

    def physical_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.spin_states.values()))


def single_spin_map(encoding: str) -> SpinAtomMap:
    """m -> excited-atom basis index for one encoded spin (|0> = |gg> or |grg>)."""
    if encoding not in _SINGLE_MAPS:
        raise ValueError(f"unknown encoding {encoding!r}")
    ((n, states),) = _SINGLE_MAPS[encoding].items()
    return SpinAtomMap(n_atoms=n, encoding=encoding, spin_states=dict(states))


def two_spin_ladder_map(encoding: str) -> SpinAtomMap:
    """(m_left, m_right) -> basis index on a mirrored ladder of two encoded spins."""
    if encoding not in _SINGLE_MAPS:
        raise ValueError(f"unknown encoding {encoding!r}")
    ((n_col, states),) = _SINGLE_MAPS[encoding].items()
    n = 2 * n_col
    combined = {}
    for ml, left_bits in states.items():
        # Right column is vertically mirrored: reverse its bit pattern.
        for mr, right_bits in states.items():
            mirrored = int(format(right_bits, f"0{n_col}b")[::-1], 2)
            combined[(ml, mr)] = (left_bits << n_col) | mirrored
    return SpinAtomMap(n_atoms=n, encoding=encoding, spin_states=combined)


def embed_spin_state(spin_map: SpinAtomMap, state: StateVector) -> StateVector:
    """Copy spin-basis amplitudes onto the mapped product-basis indices."""
    order = spin_map.spin_basis_order()
    if state.dim != len(order):
        raise ValueError(
            f"state dimension {state.dim} does not match the {len(order)}-state spin basis"
        )
    out = np.zeros(1 << spin_map.n_atoms, dtype=np.complex128)
    for k, label in enumerate(order):
        a = state.amplitudes[k]
        if label not in spin_map.spin_states:
            if abs(a) > 1e-14:
                raise ValueError(f"state has support on unmapped spin label {label!r}")
            continue
        out[spin_map.spin_states[label]] = a
    return StateVector(out)


def atom_permutation_matrix(perm) -> np.ndarray:
    """Basis permutation moving the excitation of atom i to atom perm[i]."""
    perm = tuple(int(p) for p in perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=np.complex128)
    for b in range(dim):
        b2 = 0
        for i in range(n):
            if (b >> (n - 1 - i)) & 1:
                b2 |= 1 << (n - 1 - perm[i])
        m[b2, b] = 1.0
    return m


def mirror_permutation(kind: str) -> tuple[int, ...]:
    """Atom permutation of the vertical mirror (charge conjugation) for a layout."""
    if kind not in _MIRROR_PERMS:
        raise ValueError(f"unknown layout {kind!r}")
    return _MIRROR_PERMS[kind]


@dataclass(frozen=True)
class SimulatorSystem:
    """A ready-to-run array: geometry, drive parameters, spin map and mirror."""

    geometry: AtomGeometry
    params: RydbergParams
    spin_map: SpinAtomMap
    mirror: tuple[int, ...]
    derived: dict = field(default_factory=dict)

    def hamiltonian(self) -> HermitianOperator:
        return build_rydberg_h(self.geometry, self.params)

    def embed(self, state: StateVector) -> StateVector:
        return embed_spin_state(self.spin_map, state)


def two_atom_system(omega: float, delta: float, v0: float) -> SimulatorSystem:
    """One encoded spin on a blockaded vertical pair (|0> = |gg>)."""
    return SimulatorSystem(
        geometry=geometry_two_atom(1.0, v0),
        params=RydbergParams(omega=omega, delta=delta),
        spin_map=single_spin_map("two-atom"),
        mirror=mirror_permutation("two-atom"),
        derived={"v0": v0},
    )


def three_atom_system(omega: float, delta: float, delta0: float, v0: float) -> SimulatorSystem:
    """One encoded spin on three atoms in a line; delta0 acts on the middle atom."""
    return SimulatorSystem(
        geometry=geometry_three_atom_line(1.0, v0),
        params=RydbergParams(omega=omega, delta=delta, delta0=delta0, delta0_atoms=(1,)),
        spin_map=single_spin_map("three-atom"),
        mirror=mirror_permutation("three-atom"),
        derived={"v0": v0, "v0_far": v0 / 64.0},
    )


def four_atom_system(
    omega: float,
    delta: float,
    v0: float,
    rho: float,
    v2_override: float | None = None,
) -> SimulatorSystem:
    """Two coupled encoded spins on a 2x2 mirrored ladder.

    `v2_override` replaces the geometric same-m coupling on both diagonals
    (the exact match needs an attractive value no 1/r^6 geometry provides).
    """
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")
    geom = geometry_mirrored_ladder(2, 1.0, 1.0 / rho, v0)
    c = geom.couplings()
    overrides = None
    derived = {"v0": v0, "rho": rho, "v1": c[(0, 2)], "v2": c[(0, 3)]}
    if v2_override is not None:
        overrides = {(0, 3): v2_override, (1, 2): v2_override}
        derived["v2"] = v2_override
        derived["v2_geometric"] = c[(0, 3)]
    return SimulatorSystem(
        geometry=geom,
        params=RydbergParams(omega=omega, delta=delta, pair_overrides=overrides),
        spin_map=two_spin_ladder_map("two-atom"),
        mirror=mirror_permutation("four-atom"),
        derived=derived,
    )


def six_atom_system(
    omega: float,
    delta: float,
    v0: float,
    rho: float,
    delta0: float = 0.0,
    include_middle_pair: bool = True,
) -> SimulatorSystem:
    """Two coupled encoded spins on a 3x2 mirrored ladder.

    The facing middle atoms interact with the full facing coupling V1; set
    `include_middle_pair=False` to truncate to the three listed cross
    couplings V1/V2/V3 only.
    """
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")
    geom = geometry_mirrored_ladder(3, 1.0, 1.0 / rho, v0)
    c = geom.couplings()
    overrides = None if include_middle_pair else {(1, 4): 0.0}
    derived = {
        "v0": v0,
        "v0_far": v0 / 64.0,
        "rho": rho,
        "v1": c[(0, 3)],
        "v2": c[(1, 3)],
        "v3": c[(0, 5)],
        "middle_pair": c[(1, 4)] if include_middle_pair else 0.0,
    }
    return SimulatorSystem(
        geometry=geom,
        params=RydbergParams(
            omega=omega,
            delta=delta,
            delta0=delta0,
            delta0_atoms=(1, 4),
            pair_overrides=overrides,
        ),
        spin_map=two_spin_ladder_map("three-atom"),
        mirror=mirror_permutation("six-atom"),
        derived=derived,
    )


def system_to_json_obj(geom: AtomGeometry, params: RydbergParams) -> dict:
    """JSON-serializable description of a geometry plus drive parameters."""
    return {
        "positions": [[float(x), float(y)] for x, y in geom.positions],
        "scale": float(geom.interaction_scale),
        "omega": float(params.omega),
        "delta": float(params.delta),
        "delta0": float(params.delta0),
        "delta0_atoms": list(params.delta0_atoms),
        "overrides": {
            f"{i}-{j}": float(v) for (i, j), v in (params.pair_overrides or {}).items()
        },
    }


def system_from_json_obj(obj: dict) -> tuple[AtomGeometry, RydbergParams]:
    """Inverse of `system_to_json_obj`."""
    geom = AtomGeometry(np.array(obj["positions"], dtype=np.float64), float(obj["scale"]))
    overrides = None
    if obj.get("overrides"):
        overrides = {}
        for key, v in obj["overrides"].items():
            i, j = key.split("-")
            overrides[(int(i), int(j))] = float(v)
    params = RydbergParams(
        omega=float(obj["omega"]),
        delta=float(obj["delta"]),
        delta0=float(obj.get("delta0", 0.0)),
        delta0_atoms=tuple(obj.get("delta0_atoms", ())),
        pair_overrides=overrides,
    )
    return geom, params
