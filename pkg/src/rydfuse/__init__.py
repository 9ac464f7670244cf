"""Two-atom Rydberg antiblockade gate simulator with GHZ/W state fusion."""

from .core import (
    ATOM,
    QUBIT,
    DensityMatrix,
    DimensionMismatchError,
    InvalidStateError,
    Operator,
    StateVector,
    basis_state,
    expectation,
    fidelity,
    project,
    state_from_components,
    tensor,
)
from .dynamics import (
    EvolutionSpec,
    FidelityTrace,
    Trajectory,
    default_steps,
    evolve_lindblad,
    evolve_pure,
    fidelity_trace,
    lindblad_operators,
    pair_state,
)
from .hamiltonians import (
    AtomParams,
    PhysicsError,
    PropagatorCoeffs,
    apply_gate_map,
    closed_form_coeffs,
    effective_hamiltonian,
    fig_params,
    full_hamiltonian,
    gate_matrix,
    optimal_coeffs,
    pair_gate_target,
    physical_params,
)
from .fusion import (
    CLAIRE,
    FusionBranch,
    GateModel,
    QubitRegister,
    SizeCapError,
    apply_correction,
    closed_form_gate,
    extract_pair_channel,
    fusion_fidelity,
    ideal_gate,
    make_ghz,
    make_w,
    run_fusion,
    sample_branch,
    w_success_probability,
)

__version__ = "0.1.0"
