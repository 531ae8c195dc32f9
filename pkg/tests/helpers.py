"""Shared test oracles, independent of the library's computation paths."""

import numpy as np

from cahm import StateVector, TargetCouplings
from cahm.evolution import one_spin_finals, simulator_trace, two_spin_finals


def expm_taylor(a, tol=1e-16, max_terms=80):
    """Matrix exponential by scaling-and-squaring a plain Taylor series."""
    a = np.asarray(a, dtype=np.complex128)
    norm = np.linalg.norm(a, np.inf)
    squarings = 0
    while norm / (2**squarings) > 0.5:
        squarings += 1
    b = a / (2**squarings)
    term = np.eye(a.shape[0], dtype=np.complex128)
    total = term.copy()
    for k in range(1, max_terms):
        term = term @ b / k
        total += term
        if np.linalg.norm(term, np.inf) < tol * max(1.0, np.linalg.norm(total, np.inf)):
            break
    for _ in range(squarings):
        total = total @ total
    return total


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def one_spin_rabi_oracle(u, x, times):
    """Closed-form |<m|U(t)|m=1>|^2 assembled from the analytic level formulas."""
    times = np.asarray(times, dtype=np.float64)
    root = np.sqrt(u * u + 8.0 * x * x)
    e0, eplus, eminus = 0.25 * (u - root), 0.25 * (u + root), 0.5 * u
    phi = 0.0 if x == 0 else np.arctan(-np.sqrt(2.0) * e0 / x)
    s, c = np.sin(phi), np.cos(phi)
    even = 0.5 * (s * s * np.exp(-1j * e0 * times) + c * c * np.exp(-1j * eplus * times))
    odd = 0.5 * np.exp(-1j * eminus * times)
    p1 = np.abs(even + odd) ** 2
    pm1 = np.abs(even - odd) ** 2
    p0 = 0.5 * (s * c) ** 2 * np.abs(np.exp(-1j * e0 * times) - np.exp(-1j * eplus * times)) ** 2
    return {"m=1": p1, "m=0": p0, "m=-1": pm1}


def consistent_three_atom_point(rng):
    """Random (omega, delta, delta0, v0, u, x) with all three residuals zero.

    For fixed (omega, delta, v0) the mixing and repulsion conditions pin
    x/u and x^2/u; consistency with the splitting condition is a scalar
    equation in delta0, solved here by bisection.
    """
    sqrt2 = np.sqrt(2.0)
    for _ in range(200):
        omega = rng.uniform(0.6, 1.4)
        delta = rng.uniform(10.0, 20.0)
        v0 = delta * rng.uniform(1.8, 2.2)

        def parts(d0):
            a = 0.5 * omega**2 * (1.0 / (delta - v0 / 64.0) - 1.0 / delta)
            b = omega**2 / (2.0 * sqrt2 * d0) * (1.0 / delta + 1.0 / (v0 - delta - d0))
            c = 0.25 * omega**2 * (
                1.0 / (delta + d0) + 2.0 / (v0 - delta) - 1.0 / (v0 - delta - d0)
            )
            return a, b, c

        def gap(d0):
            a, b, c = parts(d0)
            return a + a / b**2 - d0 - c

        lo, hi = 0.2, 8.0
        if gap(lo) * gap(hi) > 0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if gap(lo) * gap(mid) <= 0:
                hi = mid
            else:
                lo = mid
        d0 = 0.5 * (lo + hi)
        a, b, _ = parts(d0)
        c_part = parts(d0)[2]
        u = 2.0 * (d0 + c_part - a)
        x = u * b / sqrt2
        if abs(u) < 1e-3:
            continue
        return omega, delta, d0, v0, u, x
    raise RuntimeError("no consistent three-atom point found")


def one_spin_sim_trace(system, times):
    """Simulator trace of an encoded single spin started in m = 1."""
    psi0 = system.embed(StateVector.basis(3, 0))
    obs = [(label, system.embed(state)) for label, state in one_spin_finals()]
    return simulator_trace(
        system.hamiltonian(), psi0, obs, system.spin_map.physical_indices(), times
    )


def two_spin_sim_trace(system, times):
    """Simulator trace of two encoded spins started in |0,0>."""
    psi0 = system.embed(StateVector.basis(9, 4))
    obs = [(label, system.embed(state)) for label, state in two_spin_finals()]
    return simulator_trace(
        system.hamiltonian(), psi0, obs, system.spin_map.physical_indices(), times
    )


def fig7_target_couplings():
    return TargetCouplings(u=1.0, x=1.2, y=0.2)
