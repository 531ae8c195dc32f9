"""Truncated quantum-rotor operators and target Hamiltonians.

Each link carries angular-momentum values m = m_max .. -m_max; the basis is
ordered by descending m (|m_max> first) and, for several links, the leftmost
site is the most significant factor of the tensor product.  The target
Hamiltonian for N links is

    H = (U/2) sum_i (Lz_i)^2 + (Y/2) sum_i' (Lz_{i+1} - Lz_i)^2 - X sum_i Ux_i

where the primed sum adds the boundary terms (Lz_1)^2 + (Lz_N)^2 for open
boundary conditions.  Ux = (U+ + U-)/2 with U+-|m> = |m +- 1> and
U+-|+-m_max> = 0; for spin-1, Ux = Lx / sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import HermitianOperator, identity, kron

MAX_CHAIN_DIM = 4096


@dataclass(frozen=True)
class SpinTruncation:
    """Angular-momentum cutoff |m| <= m_max; link dimension 2*m_max + 1."""

    m_max: int

    def __post_init__(self):
        if not isinstance(self.m_max, int) or not 1 <= self.m_max <= 5:
            raise ValueError(f"m_max must be an integer in 1..5, got {self.m_max!r}")

    @property
    def dim(self) -> int:
        return 2 * self.m_max + 1

    def m_values(self) -> np.ndarray:
        """m quantum numbers in basis order (descending)."""
        return np.arange(self.m_max, -self.m_max - 1, -1, dtype=np.float64)


SPIN1 = SpinTruncation(1)


@dataclass(frozen=True)
class TargetCouplings:
    """Electric (U), current (X) and charge (Y) couplings of the target chain.

    Signs are unrestricted and carry physics: U, X and Y inherit the signs of
    the underlying inverse gauge coupling and hopping strengths.
    """

    u: float
    x: float
    y: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        for name in ("u", "x", "y"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coupling {name} must be finite")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")


@dataclass(frozen=True)
class OneSpinSpectrum:
    """Spin-1 energies E0 <= E+ plus the charge-odd level E- = U/2 and mixing angle."""

    e0: float
    eplus: float
    eminus: float
    phi: float

    def __post_init__(self):
        if self.e0 > self.eplus + 1e-12 * max(1.0, abs(self.eplus)):
            raise ValueError("one-spin spectrum requires E0 <= E+")


@dataclass(frozen=True)
class LagrangianCouplings:
    """Euclidean-lattice couplings feeding the Hamiltonian limit.

    beta_pl is the plaquette coupling, kappa_tau / kappa_s the temporal and
    spatial hoppings, and a the temporal lattice spacing.
    """

    beta_pl: float
    kappa_tau: float
    kappa_s: float
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"temporal lattice spacing must be positive, got {self.a!r}")
        if self.kappa_tau == 0:
            raise ValueError("kappa_tau must be nonzero")
        if self.beta_pl == 0:
            raise ValueError("beta_pl must be nonzero")


def op_lz(trunc: SpinTruncation = SPIN1) -> HermitianOperator:
    """Diagonal angular momentum diag(m_max, ..., -m_max)."""
    return HermitianOperator(np.diag(trunc.m_values()).astype(np.complex128))


def op_ux(trunc: SpinTruncation = SPIN1) -> HermitianOperator:
    """Truncated raising/lowering average (U+ + U-)/2: 1/2 on adjacent-m entries."""
    d = trunc.dim
    m = np.zeros((d, d), dtype=np.complex128)
    for i in range(d - 1):
        m[i, i + 1] = 0.5
        m[i + 1, i] = 0.5
    return HermitianOperator(m)


def op_charge_conjugation(trunc: SpinTruncation = SPIN1) -> np.ndarray:
    """Unitary C with C|m> = |-m>: the anti-diagonal permutation, C^2 = 1."""
    return np.fliplr(np.eye(trunc.dim, dtype=np.complex128)).copy()


def build_h1t(c: TargetCouplings, trunc: SpinTruncation = SPIN1) -> HermitianOperator:
    """One-spin target Hamiltonian (U/2) Lz^2 - X Ux."""
    lz = op_lz(trunc).matrix
    ux = op_ux(trunc).matrix
    return HermitianOperator(0.5 * c.u * (lz @ lz) - c.x * ux)


def analytic_one_spin(c: TargetCouplings) -> OneSpinSpectrum:
    """Closed-form spin-1 spectrum of (U/2) Lz^2 - X Ux.

    The charge-even block in the {|0>, |+>} basis gives
        E0 = (U - sqrt(U^2 + 8 X^2)) / 4,   E+ = (U + sqrt(U^2 + 8 X^2)) / 4,
    the charge-odd state |-> = (|1> - |-1>)/sqrt(2) stays at E- = U/2 for any X,
    and the ground-state mixing angle obeys tan(phi) = -sqrt(2) E0 / X
    (phi = 0 at X = 0 by convention, phi in (-pi/2, pi/2]).
    """
    root = math.sqrt(c.u * c.u + 8.0 * c.x * c.x)
    e0 = 0.25 * (c.u - root)
    eplus = 0.25 * (c.u + root)
    phi = 0.0 if c.x == 0.0 else math.atan(-math.sqrt(2.0) * e0 / c.x)
    return OneSpinSpectrum(e0=e0, eplus=eplus, eminus=0.5 * c.u, phi=phi)


def perturbative_one_spin(c: TargetCouplings) -> OneSpinSpectrum:
    """Second-order expansion in X: E0 = -X^2/U, E+ = U/2 + X^2/U, phi = sqrt(2) X/U."""
    if c.u == 0.0:
        raise ValueError("perturbative expansion requires U != 0")
    shift = c.x * c.x / c.u
    return OneSpinSpectrum(
        e0=-shift,
        eplus=0.5 * c.u + shift,
        eminus=0.5 * c.u,
        phi=math.sqrt(2.0) * c.x / c.u,
    )


def build_h2t(c: TargetCouplings) -> HermitianOperator:
    """Two coupled spin-1 sites: H1T (x) 1 + 1 (x) H1T + (Y/2)(Lz_L - Lz_R)^2.

    No boundary Lz^2 terms are included here; `build_chain_h` with two links
    and open boundaries adds them.
    """
    h1 = build_h1t(c, SPIN1).matrix
    lz = op_lz(SPIN1).matrix
    one = identity(3)
    diff = kron(lz, one) - kron(one, lz)
    h = kron(h1, one) + kron(one, h1) + 0.5 * c.y * (diff @ diff)
    return HermitianOperator(h)


def _site_operator(opmat: np.ndarray, site: int, n_sites: int, dim: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for i in range(n_sites):
        out = kron(out, opmat if i == site else identity(dim))
    return out


def build_chain_h(c: TargetCouplings, trunc: SpinTruncation, n_links: int) -> HermitianOperator:
    """Full N-link chain Hamiltonian.

    Open boundaries include the end terms (Y/2)[(Lz_1)^2 + (Lz_N)^2] on top of
    the nearest-neighbor charge terms.  Periodic mode closes a plain
    nearest-neighbor ring instead (experimental: the compactified boundary
    charges are not otherwise specified).
    """
    if n_links < 1:
        raise ValueError(f"n_links must be >= 1, got {n_links}")
    dim = trunc.dim
    if dim**n_links > MAX_CHAIN_DIM:
        raise ValueError(
            f"chain dimension {dim}**{n_links} exceeds the supported maximum {MAX_CHAIN_DIM}"
        )
    lz = op_lz(trunc).matrix
    ux = op_ux(trunc).matrix
    lz_i = [_site_operator(lz, i, n_links, dim) for i in range(n_links)]
    total = np.zeros((dim**n_links, dim**n_links), dtype=np.complex128)
    for i in range(n_links):
        total += 0.5 * c.u * (lz_i[i] @ lz_i[i])
        total -= c.x * _site_operator(ux, i, n_links, dim)
    if c.boundary == "open":
        for i in range(n_links - 1):
            d = lz_i[i + 1] - lz_i[i]
            total += 0.5 * c.y * (d @ d)
        total += 0.5 * c.y * (lz_i[0] @ lz_i[0])
        total += 0.5 * c.y * (lz_i[-1] @ lz_i[-1])
    else:
        for i in range(n_links):
            d = lz_i[(i + 1) % n_links] - lz_i[i]
            total += 0.5 * c.y * (d @ d)
    return HermitianOperator(total)


def couplings_from_lagrangian(lag: LagrangianCouplings) -> TargetCouplings:
    """Hamiltonian couplings from the Euclidean-lattice ones.

    U = 1/(beta_pl a),  Y = 1/(2 kappa_tau a),  X = 2 kappa_s / a; each
    Hamiltonian coupling inherits the sign of its Lagrangian counterpart.
    """
    return TargetCouplings(
        u=1.0 / (lag.beta_pl * lag.a),
        x=2.0 * lag.kappa_s / lag.a,
        y=1.0 / (2.0 * lag.kappa_tau * lag.a),
    )
