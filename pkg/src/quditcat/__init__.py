"""Mixed-dimension state-vector simulation of ancilla-catalysed controlled gates.

A dim-n qudit ancilla, used as a modular counter, mediates the n-qubit gate
C^{n-1}(U) with either 2n-1 two-body gates (coherent network) or n two-body
gates plus a Fourier-basis ancilla measurement and phase feed-forward
(measured network).  The physics module realizes the required controlled
clock gate from a number-spin cavity coupling and checks its dispersive
derivation numerically.
"""

from .hilbert import (
    CIRCUIT_TOL,
    UNITARY_TOL,
    GateOp,
    StateVector,
    SubsystemLayout,
    ancilla_overlap,
    apply,
    basis_index,
    basis_state,
    digits_of,
    fourier,
    identity,
    omega,
    pauli_x,
    pauli_z,
    phase_p,
    random_state,
    random_unitary,
    tensor,
)
from .networks import (
    AncillaDisentangleError,
    Circuit,
    NETWORK_BUILDERS,
    RunRecord,
    VerificationReport,
    ZeroProbabilityBranchError,
    build_network_a,
    build_network_b,
    build_network_b_zvariant,
    direct_controlled_gate,
    expected_global_phase,
    run_coherent,
    run_measured,
    verify,
    verify_circuit,
)
from .circuit_text import circuits_equal, emit_circuit, parse_circuit
from .physics import (
    CollectiveSpin,
    ConditionalGateResult,
    DispersiveScan,
    FockOps,
    GateFidelityReport,
    HamiltonianSpec,
    PhotonBlockError,
    SpinOps,
    collective_jc_hamiltonian,
    collective_spin_from_qubits,
    dispersive_residual,
    dispersive_second_order,
    dispersive_transform,
    evolve,
    extract_conditional_unitary,
    fock_operators,
    gate_fidelity_vs_ideal,
    generalized_jc_hamiltonian,
    interaction_hamiltonian,
    physical_conditional_z,
    spin_operators,
)

__version__ = "0.1.0"
