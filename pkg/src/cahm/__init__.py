"""Toolkit for designing and verifying Rydberg-atom analog simulators of
spin-truncated compact Abelian Higgs chains."""

__version__ = "0.1.0"

from .numerics import (
    ContractViolationError,
    HermitianOperator,
    Spectrum,
    StateVector,
    eig_hermitian,
    evolve,
    kron,
)
from .target_models import (
    SPIN1,
    LagrangianCouplings,
    OneSpinSpectrum,
    SpinTruncation,
    TargetCouplings,
    analytic_one_spin,
    build_chain_h,
    build_h1t,
    build_h2t,
    couplings_from_lagrangian,
    op_charge_conjugation,
    op_lz,
    op_ux,
    perturbative_one_spin,
)
from .rydberg_models import (
    AtomGeometry,
    RydbergParams,
    SimulatorSystem,
    SpinAtomMap,
    build_rydberg_h,
    embed_spin_state,
    four_atom_system,
    geometry_mirrored_ladder,
    geometry_three_atom_line,
    geometry_two_atom,
    pair_interaction,
    single_spin_map,
    six_atom_system,
    three_atom_system,
    two_atom_system,
    two_spin_ladder_map,
)
from .matching import (
    MatchReport,
    MatchingError,
    NewtonProblem,
    SingularDenominatorError,
    approx_three_atom_match,
    degenerate_matrix_m,
    fit_time_rescale,
    match_four_atom,
    match_six_atom,
    match_two_atom,
    solve_three_atom_newton,
    three_atom_low_sector,
    three_atom_residuals,
)
from .evolution import (
    EvolutionTrace,
    TraceComparison,
    blockade_leakage,
    compare,
    symmetric_state_two_spin,
    trace,
)
from .trotter import (
    Circuit,
    Gate,
    ShotResult,
    apply_circuit,
    circuit_unitary,
    repeat_circuit,
    sample_shots,
    trotter_step_h2r,
    trotter_step_h4r,
)
