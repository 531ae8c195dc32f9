import numpy as np
import pytest

from cahm import (
    AtomGeometry,
    RydbergParams,
    SpinAtomMap,
    StateVector,
    build_rydberg_h,
    embed_spin_state,
    four_atom_system,
    geometry_mirrored_ladder,
    geometry_three_atom_line,
    geometry_two_atom,
    pair_interaction,
    single_spin_map,
    six_atom_system,
    symmetric_state_two_spin,
    three_atom_system,
    two_atom_system,
    two_spin_ladder_map,
)
from cahm.rydberg_models import (
    atom_permutation_matrix,
    ladder_cross_couplings,
    mirror_permutation,
    system_from_json_obj,
    system_to_json_obj,
)


def test_pair_interaction_power_law():
    v0 = pair_interaction(32.0, 1.0)
    assert pair_interaction(32.0, 2.0) == v0 / 64.0
    assert abs(pair_interaction(32.0, 10.0) - v0 / 1e6) < 1e-18
    with pytest.raises(ValueError):
        pair_interaction(1.0, 0.0)


def test_pair_interaction_diagonal_distance():
    # Distance sqrt(1 + rho^2)/rho in units of the rung spacing gives the
    # one-row-apart cross coupling V0 (rho/sqrt(1+rho^2))^6.
    v0, rho = 5.0, 0.4
    r = np.sqrt(1 + rho**2) / rho
    expected = v0 * (rho / np.sqrt(1 + rho**2)) ** 6
    assert abs(pair_interaction(v0, r) - expected) < 1e-15


def test_two_atom_diagonal_energies():
    system = two_atom_system(omega=0.0, delta=-0.5, v0=32.0)
    diag = np.diag(system.hamiltonian().matrix).real
    # Basis order |gg>, |gr>, |rg>, |rr>.
    assert np.allclose(diag, [0.0, 0.5, 0.5, 1.0 + 32.0])


def test_three_atom_diagonal_energies_all_states():
    rng = np.random.default_rng(3)
    for _ in range(5):
        delta, delta0, v0 = rng.uniform(-5, 20, size=3)
        system = three_atom_system(0.0, delta, delta0, v0)
        h = system.hamiltonian().matrix
        assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0
        for b in range(8):
            bits = [(b >> (2 - i)) & 1 for i in range(3)]
            expected = -delta * sum(bits) - delta0 * bits[1]
            expected += v0 * (bits[0] * bits[1] + bits[1] * bits[2])
            expected += v0 / 64.0 * bits[0] * bits[2]
            assert abs(h[b, b].real - expected) < 1e-12
    # Named auxiliary states at (delta, delta0, v0).
    system = three_atom_system(0.0, 1.25, 0.5, 30.0)
    diag = np.diag(system.hamiltonian().matrix).real
    assert abs(diag[0b101] - (-2 * 1.25 + 30.0 / 64.0)) < 1e-12
    assert abs(diag[0b111] - (-3 * 1.25 - 0.5 + 2 * 30.0 + 30.0 / 64.0)) < 1e-12


def test_rydberg_h_hermitian_and_offdiagonal():
    system = two_atom_system(omega=-0.5, delta=-0.5, v0=32.0)
    h = system.hamiltonian().matrix
    assert np.max(np.abs(h - h.conj().T)) <= 1e-14
    assert h[0b00, 0b10] == -0.25
    assert h[0b01, 0b11] == -0.25


def test_geometry_constructors():
    assert abs(geometry_two_atom(1.0, 32.0).couplings()[(0, 1)] - 32.0) < 1e-12
    c3 = geometry_three_atom_line(1.0, 30.0).couplings()
    assert abs(c3[(0, 1)] - 30.0) < 1e-12
    assert abs(c3[(0, 2)] - 30.0 / 64.0) < 1e-15
    doubled = geometry_three_atom_line(2.0, 30.0).couplings()
    for pair in c3:
        assert abs(doubled[pair] - c3[pair] / 64.0) < 1e-15


def test_mirrored_ladder_couplings():
    # rho = (Y/V0)^(1/6) with Y=0.2, V0=64 and the derived V1, V2.
    v0, y = 64.0, 0.2
    rho = (y / v0) ** (1.0 / 6.0)
    assert abs(rho - 0.3823622) < 1e-6
    geom = geometry_mirrored_ladder(2, 1.0, 1.0 / rho, v0)
    c = geom.couplings()
    assert abs(c[(0, 2)] - y) < 1e-14  # facing pair V1 = Y by construction
    v2_expected = v0 * (rho / np.sqrt(1 + rho**2)) ** 6
    assert abs(c[(0, 3)] - v2_expected) < 1e-14
    assert abs(v2_expected - 0.1328152) < 1e-6

    rho3, v03 = 0.326, 30.0
    geom3 = geometry_mirrored_ladder(3, 1.0, 1.0 / rho3, v03)
    c3 = geom3.couplings()
    assert abs(c3[(0, 3)] - v03 * rho3**6) < 1e-12
    assert abs(c3[(0, 3)] - 0.036013) < 5e-6
    v3_expected = v03 * (rho3 / np.sqrt(1 + 4 * rho3**2)) ** 6
    assert abs(c3[(0, 5)] - v3_expected) < 1e-14
    # The facing middle atoms interact with the full facing strength V1.
    assert abs(c3[(1, 4)] - c3[(0, 3)]) < 1e-14


def test_ladder_coupling_ordering():
    for rho in np.linspace(0.05, 0.95, 10):
        cc = ladder_cross_couplings(30.0, float(rho), 3)
        assert cc["v1"] > cc["v2"] > cc["v3"] > 0.0


def test_mirror_commutes_with_hamiltonian():
    systems = [
        two_atom_system(-0.5, -0.5, 32.0),
        three_atom_system(1.0, 15.0, 0.7, 30.0),
        four_atom_system(-1.2, -0.6, 64.0, 0.38),
        six_atom_system(1.0, 15.0, 30.0, 0.326, delta0=0.4),
    ]
    for system in systems:
        h = system.hamiltonian().matrix
        m = atom_permutation_matrix(system.mirror)
        assert np.max(np.abs(m @ h - h @ m)) <= 1e-14


def test_pair_overrides_reproduce_geometry_bitwise():
    geom = geometry_mirrored_ladder(2, 1.0, 2.5, 64.0)
    base = build_rydberg_h(geom, RydbergParams(omega=-1.2, delta=-0.6))
    overridden = build_rydberg_h(
        geom, RydbergParams(omega=-1.2, delta=-0.6, pair_overrides=geom.couplings())
    )
    assert np.array_equal(base.matrix, overridden.matrix)


def test_four_atom_override_changes_only_v2_pairs():
    system = four_atom_system(-1.2, -0.6, 64.0, 0.382, v2_override=-0.2)
    h = system.hamiltonian().matrix
    # |rggr> has both same-m atoms (0, 3) excited: energy 2*0.6 + v2_override.
    idx = 0b1001
    assert abs(h[idx, idx].real - (1.2 - 0.2)) < 1e-12
    assert system.derived["v2"] == -0.2
    assert system.derived["v2_geometric"] > 0


def test_spin_maps_and_embedding():
    m2 = single_spin_map("two-atom")
    assert m2.spin_states == {1: 0b10, 0: 0b00, -1: 0b01}
    m3 = single_spin_map("three-atom")
    assert m3.spin_states == {1: 0b100, 0: 0b010, -1: 0b001}

    embedded = embed_spin_state(m3, StateVector.basis(3, 0))
    assert embedded.amplitudes[0b100] == 1.0
    plus = StateVector.normalized([1.0, 0.0, 1.0])
    out = embed_spin_state(m2, plus)
    assert abs(out.amplitudes[0b10] - 1 / np.sqrt(2)) < 1e-15
    assert abs(out.amplitudes[0b01] - 1 / np.sqrt(2)) < 1e-15
    assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12


def test_two_spin_map_indices():
    pair = two_spin_ladder_map("two-atom")
    assert pair.spin_states[(0, 0)] == 0b0000
    assert pair.spin_states[(1, 1)] == 0b1001
    assert pair.spin_states[(1, -1)] == 0b1010
    pair6 = two_spin_ladder_map("three-atom")
    assert pair6.spin_states[(0, 0)] == 0b010010
    assert pair6.spin_states[(1, 0)] == 0b100010
    assert pair6.spin_states[(0, 1)] == 0b010001
    s_embedded = embed_spin_state(pair, symmetric_state_two_spin())
    support = {i for i, a in enumerate(s_embedded.amplitudes) if abs(a) > 0}
    assert support == {0b0001, 0b0010, 0b0100, 0b1000}


def test_embed_rejects_unmapped_support():
    partial = SpinAtomMap(n_atoms=2, encoding="two-atom", spin_states={1: 0b10, 0: 0b00})
    with pytest.raises(ValueError):
        embed_spin_state(partial, StateVector.basis(3, 2))
    with pytest.raises(ValueError):
        embed_spin_state(single_spin_map("two-atom"), StateVector.basis(4, 0))


def test_mirror_permutation_matches_charge_conjugation():
    # Swapping the two atoms exchanges the m = +-1 encodings.
    m = atom_permutation_matrix(mirror_permutation("two-atom"))
    smap = single_spin_map("two-atom")
    up = embed_spin_state(smap, StateVector.basis(3, 0)).amplitudes
    down = embed_spin_state(smap, StateVector.basis(3, 2)).amplitudes
    assert np.array_equal(m @ up, down)


def test_geometry_validation():
    with pytest.raises(ValueError):
        AtomGeometry(np.array([[0.0, 0.0], [0.0, 0.0]]), 1.0)
    with pytest.raises(ValueError):
        geometry_mirrored_ladder(4, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        four_atom_system(1.0, 1.0, 64.0, 1.5)


def test_system_json_round_trip():
    system = six_atom_system(1.0, 15.0, 30.0, 0.326, include_middle_pair=False)
    obj = system_to_json_obj(system.geometry, system.params)
    geom, params = system_from_json_obj(obj)
    assert np.array_equal(geom.positions, system.geometry.positions)
    assert params == system.params
    h1 = build_rydberg_h(system.geometry, system.params).matrix
    h2 = build_rydberg_h(geom, params).matrix
    assert np.array_equal(h1, h2)
