"""Line-oriented text format for the gate networks.

One statement per line.  The header fixes the index space, then gates appear
in execution order, then the optional measurement stage:

    LAYOUT <dim> <dim> ...         subsystem dimensions, ancilla last
    ANCILLA_INIT <digit>           initial computational digit of the ancilla
    CX_N <control_qubit> <ancilla>     controlled increment on the ancilla
    CXINV_N <control_qubit> <ancilla>  controlled decrement
    CZ_N <control_qubit> <ancilla>     controlled phase (clock) gate
    F <subsystem>                      single-qudit Fourier transform
    FINV <subsystem>                   inverse Fourier transform
    CU <ancilla> <target> <k>          U on target when the ancilla reads k
    MEASURE_F <ancilla>                Fourier-basis measurement
    CORRECT <a> P^<e> <qubit> ...      on outcome a, diag(1, omega^e) on
                                       each listed qubit

Blank lines and lines starting with '#' are ignored when parsing.  The
entries of U are not part of the format; parsing takes the unitary as an
argument (X by default), so emit -> parse -> emit is byte identical.
"""

from __future__ import annotations

import numpy as np

from .hilbert import (
    GateOp,
    SubsystemLayout,
    fourier,
    omega,
    pauli_x,
    pauli_z,
    phase_p,
)
from .networks import Circuit

__all__ = ["emit_circuit", "parse_circuit", "circuits_equal"]


def _phase_power(op: np.ndarray, n: int) -> int:
    """Recover e with op = diag(1, omega^e), or raise if op is not of that form."""
    for e in range(n):
        if np.max(np.abs(op - phase_p(n, e))) < 1e-9:
            return e
    raise ValueError("correction gate is not a power of the outcome phase gate")


def emit_circuit(circuit: Circuit) -> str:
    """Serialize a circuit to the text format; deterministic byte-for-byte."""
    dims = circuit.layout.dims
    n = dims[circuit.ancilla]
    lines = [
        "LAYOUT " + " ".join(str(d) for d in dims),
        f"ANCILLA_INIT {circuit.ancilla_init}",
    ]
    for gate in circuit.gates:
        if gate.name in ("CX_N", "CXINV_N", "CZ_N"):
            lines.append(f"{gate.name} {gate.control[0]} {gate.targets[0]}")
        elif gate.name in ("F", "FINV"):
            lines.append(f"{gate.name} {gate.targets[0]}")
        elif gate.name == "CU":
            anc, k = gate.control
            lines.append(f"CU {anc} {gate.targets[0]} {k}")
        else:
            raise ValueError(
                f"gate {gate.name!r} cannot be expressed in the text format"
            )
    if circuit.measurement is not None:
        anc, basis_change = circuit.measurement
        if np.max(np.abs(basis_change - fourier(dims[anc]))) > 1e-9:
            raise ValueError("only Fourier-basis measurements can be serialized")
        lines.append(f"MEASURE_F {anc}")
        for a in sorted(circuit.corrections or {}):
            by_power: dict[int, list[int]] = {}
            for q, op in circuit.corrections[a]:
                by_power.setdefault(_phase_power(op, n), []).append(q)
            for e in sorted(by_power):
                qubits = " ".join(str(q) for q in sorted(by_power[e]))
                lines.append(f"CORRECT {a} P^{e} {qubits}")
    return "\n".join(lines) + "\n"


def _parse_error(lineno: int, message: str) -> ValueError:
    return ValueError(f"line {lineno}: {message}")


def parse_circuit(text: str, u: np.ndarray | None = None) -> Circuit:
    """Parse the text format back into a Circuit.

    The CU line does not carry the entries of U, so the unitary is supplied
    here (default: the qubit flip X).
    """
    u = pauli_x(2) if u is None else np.asarray(u, dtype=complex)
    layout: SubsystemLayout | None = None
    ancilla_init: int | None = None
    gates: list[GateOp] = []
    measurement = None
    corrections: dict[int, tuple[tuple[int, np.ndarray], ...]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        token, args = fields[0], fields[1:]

        if token == "LAYOUT":
            if layout is not None:
                raise _parse_error(lineno, "duplicate LAYOUT header")
            try:
                layout = SubsystemLayout(tuple(int(a) for a in args))
            except ValueError as exc:
                raise _parse_error(lineno, str(exc)) from None
            continue
        if layout is None:
            raise _parse_error(lineno, "LAYOUT header must come first")
        anc_dim = layout.dims[-1]

        if token == "ANCILLA_INIT":
            if len(args) != 1:
                raise _parse_error(lineno, "ANCILLA_INIT takes one digit")
            ancilla_init = int(args[0])
        elif token in ("CX_N", "CXINV_N", "CZ_N"):
            if len(args) != 2:
                raise _parse_error(lineno, f"{token} takes control and ancilla indices")
            q, anc = int(args[0]), int(args[1])
            matrix = {
                "CX_N": pauli_x(anc_dim),
                "CXINV_N": pauli_x(anc_dim).conj().T,
                "CZ_N": pauli_z(anc_dim),
            }[token]
            gates.append(GateOp(matrix, (anc,), control=(q, 1), name=token))
        elif token in ("F", "FINV"):
            if len(args) != 1:
                raise _parse_error(lineno, f"{token} takes one subsystem index")
            target = int(args[0])
            matrix = fourier(layout.dims[target])
            if token == "FINV":
                matrix = matrix.conj().T
            gates.append(GateOp(matrix, (target,), name=token))
        elif token == "CU":
            if len(args) != 3:
                raise _parse_error(lineno, "CU takes ancilla, target, and control value")
            anc, target, k = (int(a) for a in args)
            gates.append(GateOp(u, (target,), control=(anc, k), name="CU"))
        elif token == "MEASURE_F":
            if len(args) != 1:
                raise _parse_error(lineno, "MEASURE_F takes one subsystem index")
            anc = int(args[0])
            measurement = (anc, fourier(layout.dims[anc]))
        elif token == "CORRECT":
            if len(args) < 2 or not args[1].startswith("P^"):
                raise _parse_error(lineno, "expected CORRECT <a> P^<e> <qubit> ...")
            a = int(args[0])
            e = int(args[1][2:])
            entries = corrections.get(a, ())
            entries += tuple((int(q), phase_p(anc_dim, e)) for q in args[2:])
            corrections[a] = entries
        else:
            raise _parse_error(lineno, f"unknown statement {token!r}")

    if layout is None:
        raise ValueError("missing LAYOUT header")
    if ancilla_init is None:
        raise ValueError("missing ANCILLA_INIT header")
    try:
        return Circuit(
            layout,
            tuple(gates),
            ancilla=layout.n_subsystems - 1,
            ancilla_init=ancilla_init,
            measurement=measurement,
            corrections=corrections if measurement is not None else None,
        )
    except ValueError as exc:
        raise ValueError(f"inconsistent circuit: {exc}") from None


def circuits_equal(a: Circuit, b: Circuit, tol: float = 1e-12) -> bool:
    """Structural equality: same wiring, same gate matrices, same stages."""
    if a.layout.dims != b.layout.dims:
        return False
    if (a.ancilla, a.ancilla_init) != (b.ancilla, b.ancilla_init):
        return False
    if len(a.gates) != len(b.gates):
        return False
    for ga, gb in zip(a.gates, b.gates):
        if (ga.name, ga.targets, ga.control) != (gb.name, gb.targets, gb.control):
            return False
        if ga.unitary.shape != gb.unitary.shape:
            return False
        if np.max(np.abs(ga.unitary - gb.unitary)) > tol:
            return False
    if (a.measurement is None) != (b.measurement is None):
        return False
    if a.measurement is not None:
        if a.measurement[0] != b.measurement[0]:
            return False
        if np.max(np.abs(a.measurement[1] - b.measurement[1])) > tol:
            return False
    ca, cb = a.corrections or {}, b.corrections or {}
    if ca.keys() != cb.keys():
        return False
    for key in ca:
        if len(ca[key]) != len(cb[key]):
            return False
        for (qa, opa), (qb, opb) in zip(ca[key], cb[key]):
            if qa != qb or np.max(np.abs(opa - opb)) > tol:
                return False
    return True
