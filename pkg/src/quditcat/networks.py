"""Ancilla-catalysed multi-controlled gate networks and their verification.

Both constructions here realize the n-qubit gate C^{n-1}(U): apply a 2x2
unitary U to the last qubit exactly when the first n-1 qubits are all |1>.
The workhorse is a single dim-n qudit ancilla used as a modular counter.

Network A (coherent, 2n-1 two-body gates): n-1 controlled-increment gates
add each control qubit's value to the ancilla, a controlled-U fires when the
counter reads the trigger digit, then n-1 controlled-decrement gates return
the counter to its initial digit.  The decrement stage must subtract, not
add again: with initial digit k+1 the counter reads k+1 + sum(i) after the
increments, and only subtracting the same sum returns it to k+1 for every
input.  Adding a second time would leave k+1 + 2*sum(i), which is input
dependent, so the ancilla would stay entangled.

Network B (measured, n two-body gates): the decrement stage is dropped.
Instead the ancilla is measured in the Fourier basis (apply F, then read the
computational basis) and the outcome a is fed forward as the phase gate
diag(1, omega^-a) on every control qubit.  Writing the pre-measurement state
over qubit basis states i with counter digit sum(i) + k + 1, outcome a
projects component i onto the phase omega^{a(sum(i)+k+1)}; the correction
cancels the sum(i) dependence and leaves the single global phase
omega^{a(k+1)}.  Every outcome occurs with probability exactly 1/n, so the
gate is deterministic and nothing is post-selected.

The z-variant of network B rewrites each controlled-increment through the
identity X_n = F^{-1} Z_n F.  Adjacent F F^{-1} pairs cancel, leaving a
single F on the ancilla up front, n-1 controlled-phase gates, one F^{-1}
before the controlled-U, and a final F that is absorbed into the
Fourier-basis measurement.  The induced channel is identical to network B's,
outcome by outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    CIRCUIT_TOL,
    GateOp,
    StateVector,
    SubsystemLayout,
    ancilla_overlap,
    apply,
    basis_index,
    basis_state,
    digits_of,
    fourier,
    omega,
    pauli_x,
    pauli_z,
    phase_p,
    random_state,
    tensor,
)

__all__ = [
    "AncillaDisentangleError",
    "ZeroProbabilityBranchError",
    "Circuit",
    "RunRecord",
    "VerificationReport",
    "direct_controlled_gate",
    "build_network_a",
    "build_network_b",
    "build_network_b_zvariant",
    "correction_exponent",
    "expected_global_phase",
    "run_coherent",
    "run_measured",
    "verify",
    "verify_circuit",
    "NETWORK_BUILDERS",
]


class AncillaDisentangleError(RuntimeError):
    """The ancilla failed to return to a factorized state; the circuit is wrong."""


class ZeroProbabilityBranchError(ValueError):
    """A fixed measurement outcome was requested on a branch with no weight."""


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate list over a qubit register plus one qudit ancilla.

    ``measurement`` is an optional pair (ancilla index, basis-change unitary):
    apply the basis change to the ancilla, then read it in the computational
    basis.  ``corrections`` maps each outcome to the single-qubit gates that
    are fed forward onto specific subsystems.
    """

    layout: SubsystemLayout
    gates: tuple[GateOp, ...]
    ancilla: int
    ancilla_init: int
    measurement: tuple[int, np.ndarray] | None = None
    corrections: dict[int, tuple[tuple[int, np.ndarray], ...]] | None = None

    def __post_init__(self) -> None:
        ns = self.layout.n_subsystems
        if not 0 <= self.ancilla < ns:
            raise ValueError(f"ancilla index {self.ancilla} out of range")
        if not 0 <= self.ancilla_init < self.layout.dims[self.ancilla]:
            raise ValueError(f"ancilla digit {self.ancilla_init} out of range")
        for gate in self.gates:
            refs = set(gate.targets)
            if gate.control is not None:
                refs.add(gate.control[0])
            if any(not 0 <= r < ns for r in refs):
                raise ValueError(f"gate references subsystems outside layout: {refs}")

    @property
    def n_qubits(self) -> int:
        return self.layout.n_subsystems - 1

    @property
    def two_body_count(self) -> int:
        """Number of entangling (controlled) gates; the resource metric."""
        return sum(1 for g in self.gates if g.control is not None)

    def controlled_u(self) -> GateOp:
        """The gate conditioned on the ancilla, i.e. the C(U) stage."""
        for gate in self.gates:
            if gate.control is not None and gate.control[0] == self.ancilla:
                return gate
        raise ValueError("circuit has no gate controlled by the ancilla")

    @property
    def control_value(self) -> int:
        return self.controlled_u().control[1]

    @property
    def u_matrix(self) -> np.ndarray:
        return self.controlled_u().unitary


@dataclass(frozen=True, eq=False)
class RunRecord:
    """One measurement branch of a measured run.

    ``global_phase`` is the unit scalar relating the corrected state to the
    reference output <reference|state>; its modulus is 1 whenever the branch
    realized the gate exactly.
    """

    outcome: int | None
    probability: float
    pre_correction_state: StateVector
    post_correction_state: StateVector
    global_phase: complex


@dataclass(frozen=True)
class VerificationReport:
    n: int
    max_deviation: float
    per_outcome_deviation: dict[int, float] = field(default_factory=dict)
    gate_count: int = 0
    passed: bool = False


def direct_controlled_gate(n: int, u: np.ndarray) -> np.ndarray:
    """Dense C^{n-1}(U) on n qubits, built basis state by basis state.

    This is the brute-force reference both networks are checked against:
    for each computational basis state, U acts on the last qubit raised to
    the product of the first n-1 bits (0 or 1), everything else is fixed.
    """
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got {n}")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"target unitary must be 2x2, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > 1e-12:
        raise ValueError("target gate is not unitary")
    dim = 2**n
    layout = SubsystemLayout((2,) * n)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = digits_of(col, layout)
        fire = 1
        for b in bits[:-1]:
            fire *= b
        if fire:
            flipped = bits[:-1] + (1 - bits[-1],)
            out[col, col] = u[bits[-1], bits[-1]]
            out[basis_index(flipped, layout), col] = u[1 - bits[-1], bits[-1]]
        else:
            out[col, col] = 1.0
    return out


def _network_layout(n: int) -> SubsystemLayout:
    return SubsystemLayout((2,) * n + (n,))


def _check_build_args(n: int, u: np.ndarray, k: int) -> np.ndarray:
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got {n}")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"target unitary must be 2x2, got shape {u.shape}")
    if not 0 <= k < n:
        raise ValueError(f"ancilla control value {k} out of range for dimension {n}")
    return u


def build_network_a(n: int, u: np.ndarray, ancilla_control_value: int = 1) -> Circuit:
    """Coherent C^{n-1}(U) network: increment, fire, decrement; 2n-1 gates.

    The ancilla starts in |k+1 mod n> so the counter reads the trigger digit
    k exactly when all n-1 controls are |1>.
    """
    k = ancilla_control_value
    u = _check_build_args(n, u, k)
    layout = _network_layout(n)
    anc = n
    xn = pauli_x(n)
    gates = [GateOp(xn, (anc,), control=(q, 1), name="CX_N") for q in range(n - 1)]
    gates.append(GateOp(u, (n - 1,), control=(anc, k), name="CU"))
    gates.extend(
        GateOp(xn.conj().T, (anc,), control=(q, 1), name="CXINV_N")
        for q in reversed(range(n - 1))
    )
    return Circuit(layout, tuple(gates), ancilla=anc, ancilla_init=(k + 1) % n)


def correction_exponent(n: int, outcome: int) -> int:
    """Phase-gate power fed forward for a given measurement outcome.

    Outcome a tags each qubit component with omega^{a * sum(controls)}, so
    the correction on every control qubit is diag(1, omega^{-a}), realized
    as the non-negative power P^{(n-a) mod n}.
    """
    return (n - outcome) % n


def _measurement_corrections(n: int) -> dict[int, tuple[tuple[int, np.ndarray], ...]]:
    return {
        a: tuple((q, phase_p(n, correction_exponent(n, a))) for q in range(n - 1))
        for a in range(n)
    }


def build_network_b(n: int, u: np.ndarray, ancilla_control_value: int = 1) -> Circuit:
    """Measured C^{n-1}(U) network: n two-body gates plus feed-forward.

    The same correction gate is applied to every control qubit, so the
    design stays homogeneous in the controls.
    """
    k = ancilla_control_value
    u = _check_build_args(n, u, k)
    layout = _network_layout(n)
    anc = n
    xn = pauli_x(n)
    gates = [GateOp(xn, (anc,), control=(q, 1), name="CX_N") for q in range(n - 1)]
    gates.append(GateOp(u, (n - 1,), control=(anc, k), name="CU"))
    return Circuit(
        layout,
        tuple(gates),
        ancilla=anc,
        ancilla_init=(k + 1) % n,
        measurement=(anc, fourier(n)),
        corrections=_measurement_corrections(n),
    )


def build_network_b_zvariant(n: int, u: np.ndarray, ancilla_control_value: int = 1) -> Circuit:
    """Network B with each controlled-increment conjugated into a phase gate.

    Substituting X_n = F^{-1} Z_n F into every controlled-increment and
    cancelling adjacent F F^{-1} pairs leaves: one F on the ancilla up
    front, n-1 controlled-Z_n gates, one F^{-1}, the controlled-U, and a
    final F absorbed into the Fourier-basis measurement.  Still n two-body
    gates; the extra Fourier factors are local to the ancilla.
    """
    k = ancilla_control_value
    u = _check_build_args(n, u, k)
    layout = _network_layout(n)
    anc = n
    f = fourier(n)
    zn = pauli_z(n)
    gates = [GateOp(f, (anc,), name="F")]
    gates.extend(GateOp(zn, (anc,), control=(q, 1), name="CZ_N") for q in range(n - 1))
    gates.append(GateOp(f.conj().T, (anc,), name="FINV"))
    gates.append(GateOp(u, (n - 1,), control=(anc, k), name="CU"))
    return Circuit(
        layout,
        tuple(gates),
        ancilla=anc,
        ancilla_init=(k + 1) % n,
        measurement=(anc, fourier(n)),
        corrections=_measurement_corrections(n),
    )


def expected_global_phase(n: int, outcome: int, control_value: int = 1) -> complex:
    """Residual global phase of a corrected branch, omega^{a (k+1)}."""
    return omega(n) ** (outcome * (control_value + 1))


def _propagate(circuit: Circuit, qubit_state: StateVector) -> StateVector:
    anc_dim = circuit.layout.dims[circuit.ancilla]
    full = tensor(
        qubit_state, basis_state(SubsystemLayout((anc_dim,)), (circuit.ancilla_init,))
    )
    if full.layout.dims != circuit.layout.dims:
        raise ValueError(
            f"input state layout {qubit_state.layout.dims} does not match "
            f"circuit qubit register {circuit.layout.dims[:-1]}"
        )
    for gate in circuit.gates:
        full = apply(gate, full)
    return full


def _strip_ancilla(full: StateVector, ancilla: int, digit: int) -> StateVector:
    dims = full.layout.dims
    psi = full.amps.reshape(dims)
    sel = [slice(None)] * len(dims)
    sel[ancilla] = digit
    sliced = np.array(psi[tuple(sel)]).reshape(-1)
    sliced /= np.linalg.norm(sliced)
    remaining = dims[:ancilla] + dims[ancilla + 1 :]
    return StateVector(SubsystemLayout(remaining), sliced)


def run_coherent(circuit: Circuit, qubit_state: StateVector) -> StateVector:
    """Run a measurement-free circuit and return the qubit register state.

    The ancilla must come back factorized in its initial digit; a residual
    at or above CIRCUIT_TOL means the network construction is wrong and
    raises AncillaDisentangleError.
    """
    if circuit.measurement is not None:
        raise ValueError("circuit has a measurement stage; use run_measured")
    full = _propagate(circuit, qubit_state)
    _, residual = ancilla_overlap(full, circuit.ancilla, circuit.ancilla_init)
    if residual >= CIRCUIT_TOL:
        raise AncillaDisentangleError(
            f"ancilla failed to disentangle: residual {residual:.3e} "
            f"at digit {circuit.ancilla_init}"
        )
    return _strip_ancilla(full, circuit.ancilla, circuit.ancilla_init)


def _measure_branch(
    circuit: Circuit,
    measured: StateVector,
    outcome: int,
    probability: float,
    reference: np.ndarray,
) -> RunRecord:
    pre = _strip_ancilla(measured, circuit.ancilla, outcome)
    post = pre
    for subsystem, op in (circuit.corrections or {}).get(outcome, ()):
        post = apply(GateOp(op, (subsystem,)), post)
    phase = complex(np.vdot(reference, post.amps))
    modulus = abs(phase)
    if modulus > 1e-14:
        phase /= modulus
    return RunRecord(
        outcome=outcome,
        probability=probability,
        pre_correction_state=pre,
        post_correction_state=post,
        global_phase=phase,
    )


def run_measured(
    circuit: Circuit,
    qubit_state: StateVector,
    outcome: int | str = "all",
    seed: int | None = None,
) -> RunRecord | list[RunRecord]:
    """Run a measured circuit through projection and feed-forward.

    ``outcome`` selects the branch policy: an integer projects onto that
    fixed ancilla reading, "random" samples one branch from the outcome
    distribution with the given seed, and "all" (the default) returns a
    record for every branch with nonzero probability.  Branch probabilities
    always sum to 1.

    Each record carries the branch probability, the qubit states before and
    after correction, and the global phase relative to the directly built
    C^{n-1}(U) output.
    """
    if circuit.measurement is None:
        raise ValueError("circuit has no measurement stage; use run_coherent")
    full = _propagate(circuit, qubit_state)
    anc, basis_change = circuit.measurement
    measured = apply(GateOp(basis_change, (anc,)), full)

    anc_dim = circuit.layout.dims[anc]
    psi = measured.amps.reshape(circuit.layout.dims)
    moved = np.moveaxis(psi, anc, -1)
    probs = np.sum(np.abs(moved) ** 2, axis=tuple(range(moved.ndim - 1)))

    oracle = direct_controlled_gate(circuit.n_qubits, circuit.u_matrix)
    reference = oracle @ qubit_state.amps

    if isinstance(outcome, (int, np.integer)):
        a = int(outcome)
        if not 0 <= a < anc_dim:
            raise ValueError(f"outcome {a} out of range for ancilla dimension {anc_dim}")
        if probs[a] < 1e-14:
            raise ZeroProbabilityBranchError(
                f"outcome {a} has probability {probs[a]:.3e}"
            )
        return _measure_branch(circuit, measured, a, float(probs[a]), reference)
    if outcome == "random":
        rng = np.random.default_rng(seed)
        a = int(rng.choice(anc_dim, p=probs / probs.sum()))
        return _measure_branch(circuit, measured, a, float(probs[a]), reference)
    if outcome == "all":
        return [
            _measure_branch(circuit, measured, a, float(probs[a]), reference)
            for a in range(anc_dim)
            if probs[a] >= 1e-14
        ]
    raise ValueError(f"unknown outcome mode {outcome!r}")


def _verification_inputs(n: int, n_random: int, seed: int) -> list[StateVector]:
    layout = SubsystemLayout((2,) * n)
    inputs = [basis_state(layout, digits_of(i, layout)) for i in range(2**n)]
    rng = np.random.default_rng(seed)
    inputs.extend(random_state(layout, rng) for _ in range(n_random))
    return inputs


def verify_circuit(
    circuit: Circuit,
    u: np.ndarray,
    n_random: int = 16,
    seed: int = 0,
    tol: float = CIRCUIT_TOL,
) -> VerificationReport:
    """Check a circuit against the directly built C^{n-1}(U) map.

    Sweeps the full computational basis plus random states.  Coherent
    circuits are compared state by state; measured circuits are checked on
    every outcome branch (corrected state equal to the reference up to the
    predicted global phase, probabilities summing to 1).  Failures are
    reported in the deviations, never raised.
    """
    n = circuit.n_qubits
    oracle = direct_controlled_gate(n, u)
    inputs = _verification_inputs(n, n_random, seed)
    max_dev = 0.0
    per_outcome: dict[int, float] = {}

    if circuit.measurement is None:
        for state in inputs:
            try:
                out = run_coherent(circuit, state)
            except AncillaDisentangleError:
                max_dev = float("inf")
                break
            dev = float(np.max(np.abs(out.amps - oracle @ state.amps)))
            max_dev = max(max_dev, dev)
    else:
        k = circuit.control_value
        for state in inputs:
            records = run_measured(circuit, state, outcome="all")
            total_prob = sum(r.probability for r in records)
            max_dev = max(max_dev, abs(total_prob - 1.0))
            for rec in records:
                reference = oracle @ state.amps
                overlap = complex(np.vdot(reference, rec.post_correction_state.amps))
                dev = abs(1.0 - abs(overlap))
                phase_dev = abs(
                    rec.global_phase - expected_global_phase(n, rec.outcome, k)
                )
                branch_dev = max(dev, phase_dev)
                per_outcome[rec.outcome] = max(
                    per_outcome.get(rec.outcome, 0.0), branch_dev
                )
                max_dev = max(max_dev, branch_dev)

    return VerificationReport(
        n=n,
        max_deviation=max_dev,
        per_outcome_deviation=per_outcome,
        gate_count=circuit.two_body_count,
        passed=bool(max_dev < tol),
    )


NETWORK_BUILDERS = {
    "a": build_network_a,
    "b": build_network_b,
    "b-z": build_network_b_zvariant,
}


def verify(
    n: int,
    u: np.ndarray,
    which_network: str,
    ancilla_control_value: int = 1,
    n_random: int = 16,
    seed: int = 0,
) -> VerificationReport:
    """Build the requested network and verify it against the direct map."""
    try:
        builder = NETWORK_BUILDERS[which_network]
    except KeyError:
        raise ValueError(
            f"unknown network {which_network!r}; expected one of {sorted(NETWORK_BUILDERS)}"
        ) from None
    circuit = builder(n, u, ancilla_control_value=ancilla_control_value)
    return verify_circuit(circuit, u, n_random=n_random, seed=seed)
