"""Acceptance suite: every release criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from quditcat.circuit_text import emit_circuit, parse_circuit
from quditcat.hilbert import (
    GateOp,
    SubsystemLayout,
    ancilla_overlap,
    apply,
    basis_state,
    digits_of,
    pauli_x,
    pauli_z,
    random_unitary,
    tensor,
)
from quditcat.networks import (
    Circuit,
    build_network_a,
    build_network_b,
    build_network_b_zvariant,
    direct_controlled_gate,
    run_measured,
    verify_circuit,
)
from quditcat.physics import (
    HamiltonianSpec,
    collective_jc_hamiltonian,
    collective_spin_from_qubits,
    dispersive_residual,
    evolve,
    extract_conditional_unitary,
    physical_conditional_z,
    spin_operators,
)


@contextmanager
def criterion(num, description):
    try:
        yield
    except BaseException:
        print(f"\n[acceptance] criterion {num} ({description}): FAIL")
        raise
    print(f"\n[acceptance] criterion {num} ({description}): PASS")


def target_unitaries():
    return [
        ("x", pauli_x(2)),
        ("z", pauli_z(2)),
        ("random:101", random_unitary(2, seed=101)),
        ("random:202", random_unitary(2, seed=202)),
        ("random:303", random_unitary(2, seed=303)),
    ]


def commutator(a, b):
    return a @ b - b @ a


def test_criterion_1_network_a_correctness():
    with criterion(1, "coherent network equals the direct gate"):
        start = time.monotonic()
        for n in range(2, 7):
            layout = SubsystemLayout((2,) * n)
            anc_layout = SubsystemLayout((n,)) if n > 2 else SubsystemLayout((2,))
            for _, u in target_unitaries():
                circuit = build_network_a(n, u)
                oracle = direct_controlled_gate(n, u)
                max_dev = 0.0
                for col in range(2**n):
                    state = basis_state(layout, digits_of(col, layout))
                    full = tensor(
                        state,
                        basis_state(
                            SubsystemLayout((n,)) if n >= 2 else anc_layout,
                            (circuit.ancilla_init,),
                        ),
                    )
                    for gate in circuit.gates:
                        full = apply(gate, full)
                    _, residual = ancilla_overlap(
                        full, circuit.ancilla, circuit.ancilla_init
                    )
                    assert residual < 1e-10, (n, col, residual)
                    psi = full.amps.reshape(circuit.layout.dims)
                    column = psi[..., circuit.ancilla_init].reshape(-1)
                    max_dev = max(max_dev, float(np.max(np.abs(column - oracle[:, col]))))
                assert max_dev < 1e-10, (n, max_dev)
        elapsed = time.monotonic() - start
        assert elapsed < 10.0, f"criterion 1 took {elapsed:.1f}s"


def test_criterion_2_network_b_every_outcome():
    with criterion(2, "measured network exact on every branch, no post-selection"):
        for n in range(2, 7):
            layout = SubsystemLayout((2,) * n)
            for _, u in target_unitaries():
                circuit = build_network_b(n, u)
                oracle = direct_controlled_gate(n, u)
                for col in range(2**n):
                    state = basis_state(layout, digits_of(col, layout))
                    reference = oracle @ state.amps
                    records = run_measured(circuit, state, outcome="all")
                    total = sum(r.probability for r in records)
                    assert abs(total - 1.0) < 1e-12
                    for rec in records:
                        overlap = complex(
                            np.vdot(reference, rec.post_correction_state.amps)
                        )
                        assert abs(overlap) > 1 - 1e-10, (n, col, rec.outcome)
                        expected = np.exp(4j * np.pi * rec.outcome / n)
                        assert abs(rec.global_phase - expected) < 1e-10, (
                            n,
                            col,
                            rec.outcome,
                        )


def test_criterion_3_gate_counts():
    with criterion(3, "two-body gate counts, 2n-1 coherent and n measured"):
        u = pauli_x(2)
        for n in range(2, 9):
            assert build_network_a(n, u).two_body_count == 2 * n - 1
            assert build_network_b(n, u).two_body_count == n
            assert build_network_b_zvariant(n, u).two_body_count == n


def test_criterion_4_conditional_gate_extraction():
    with criterion(4, "one-photon block is the phased clock gate"):
        for n in range(2, 8):
            spec = HamiltonianSpec(s=(n - 1) / 2, chi=1.0, cutoff=2)
            result = extract_conditional_unitary(spec)
            half_omega = np.exp(1j * np.pi / n)
            deviation = np.max(np.abs(result.block1 + half_omega * pauli_z(n)))
            assert deviation < 1e-10, (n, deviation)
            assert result.deviation < 1e-10


def test_criterion_5_dispersive_scaling():
    with criterion(5, "dispersive residual scales as the cube of the coupling"):
        start = time.monotonic()
        g_values = np.geomspace(1e-2, 1e-3, 5)
        for s in (0.5, 1.0):
            spec = HamiltonianSpec(omega=1.0, Omega=2.0, s=s, cutoff=8)
            scan = dispersive_residual(spec, g_values)
            assert scan.photon_block == 4
            assert 2.7 < scan.slope < 3.3, (s, scan.slope)
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"criterion 5 took {elapsed:.1f}s"


def test_criterion_6_collective_spin():
    with criterion(6, "collective qubit operators realize the exact spin"):
        for m in range(1, 6):
            collective = collective_spin_from_qubits(m)
            reference = spin_operators(m / 2)
            w = collective.isometry
            sz = w.conj().T @ collective.sz @ w
            sp = w.conj().T @ collective.splus @ w
            sm = w.conj().T @ collective.sminus @ w
            assert np.max(np.abs(sz - reference.sz)) < 1e-12
            assert np.max(np.abs(sp - reference.splus)) < 1e-12
            assert np.max(np.abs(sm - reference.sminus)) < 1e-12
            assert np.max(np.abs(commutator(sp, sm) - 2 * sz)) < 1e-12
            assert np.max(np.abs(commutator(sz, sp) - sp)) < 1e-12
            assert np.max(np.abs(commutator(sz, sm) + sm)) < 1e-12

        spec = HamiltonianSpec(omega=1.0, Omega=1.6, g=0.25, cutoff=6)
        rng = np.random.default_rng(60)
        for m in range(1, 6):
            h = collective_jc_hamiltonian(spec, m)
            w_full = np.kron(
                np.eye(spec.cutoff + 1), collective_spin_from_qubits(m).isometry
            )
            projector_out = np.eye(w_full.shape[0]) - w_full @ w_full.conj().T
            for t in rng.uniform(0.1, 20.0, size=2):
                leakage = np.linalg.norm(projector_out @ evolve(h, float(t)) @ w_full, 2)
                assert leakage < 1e-10, (m, t, leakage)


def _with_physical_cz(circuit: Circuit, n: int) -> Circuit:
    """Swap each abstract controlled-clock gate for the evolved two-body gate
    plus its local control-phase correction."""
    gate_phys, local_fix = physical_conditional_z(n)
    new_gates = []
    for gate in circuit.gates:
        if gate.name == "CZ_N":
            q = gate.control[0]
            anc = gate.targets[0]
            new_gates.append(GateOp(gate_phys, (q, anc), name="PHYS_CZ"))
            new_gates.append(GateOp(local_fix, (q,), name="LOCAL_FIX"))
        else:
            new_gates.append(gate)
    return Circuit(
        circuit.layout,
        tuple(new_gates),
        ancilla=circuit.ancilla,
        ancilla_init=circuit.ancilla_init,
        measurement=circuit.measurement,
        corrections=circuit.corrections,
    )


def test_criterion_7_zvariant_and_physical_substitution():
    with criterion(7, "phase-gate variant matches, evolved gates keep it passing"):
        for n in range(2, 6):
            u = random_unitary(2, seed=700 + n)
            circ_b = build_network_b(n, u)
            circ_z = build_network_b_zvariant(n, u)
            layout = SubsystemLayout((2,) * n)
            for col in range(2**n):
                state = basis_state(layout, digits_of(col, layout))
                recs_b = {r.outcome: r for r in run_measured(circ_b, state, "all")}
                recs_z = {r.outcome: r for r in run_measured(circ_z, state, "all")}
                assert recs_b.keys() == recs_z.keys()
                for a in recs_b:
                    assert abs(recs_b[a].probability - recs_z[a].probability) < 1e-10
                    delta = np.max(
                        np.abs(
                            recs_b[a].post_correction_state.amps
                            - recs_z[a].post_correction_state.amps
                        )
                    )
                    assert delta < 1e-10, (n, col, a, delta)

            physical = _with_physical_cz(circ_z, n)
            report = verify_circuit(physical, u, n_random=8, tol=1e-9)
            assert report.passed, (n, report.max_deviation)


def test_criterion_8_serialization_round_trip():
    with criterion(8, "circuit files round-trip byte for byte"):
        u = pauli_x(2)
        for n in range(2, 9):
            for builder in (build_network_a, build_network_b, build_network_b_zvariant):
                text = emit_circuit(builder(n, u))
                assert emit_circuit(parse_circuit(text)) == text
