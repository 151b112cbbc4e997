"""Command line driver: verification runs, branch tables, physics sweeps, circuit files.

Subcommands:
    verify    check a network against the directly built gate
    branches  enumerate every measurement outcome of a measured network
    sweep     dispersive-residual scan plus gate fidelity, written as CSV
    emit      serialize a network in the circuit text format

Exit codes: 0 all requested checks passed, 1 check or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .circuit_text import emit_circuit
from .hilbert import (
    CIRCUIT_TOL,
    SubsystemLayout,
    basis_state,
    pauli_x,
    pauli_z,
    random_state,
    random_unitary,
)
from .networks import (
    NETWORK_BUILDERS,
    direct_controlled_gate,
    expected_global_phase,
    run_measured,
    verify,
)
from .physics import HamiltonianSpec, dispersive_residual, gate_fidelity_vs_ideal

DEFAULT_BATCH_RANGE = range(2, 7)


def _parse_u(selector: str) -> tuple[np.ndarray, str]:
    if selector == "x":
        return pauli_x(2), "x"
    if selector == "z":
        return pauli_z(2), "z"
    if selector.startswith("random:"):
        seed = int(selector.split(":", 1)[1])
        return random_unitary(2, seed), f"random:{seed}"
    raise ValueError(f"unknown target unitary {selector!r}; use x, z, or random:SEED")


def cmd_verify(args: argparse.Namespace) -> int:
    u, u_label = _parse_u(args.u)
    ns = [args.n] if args.n is not None else list(DEFAULT_BATCH_RANGE)
    print(f"# verify network={args.network} u={u_label} "
          f"control={args.control_value} seed={args.seed}")
    all_passed = True
    for n in ns:
        report = verify(
            n,
            u,
            args.network,
            ancilla_control_value=args.control_value,
            seed=args.seed,
        )
        status = "PASS" if report.passed else "FAIL"
        print(
            f"network={args.network} n={n} gate_count={report.gate_count} "
            f"max_deviation={report.max_deviation:.3e} status={status}"
        )
        all_passed &= report.passed
    return 0 if all_passed else 1


def cmd_branches(args: argparse.Namespace) -> int:
    if args.network == "a":
        raise ValueError("branch enumeration needs a measured network (b or b-z)")
    u, u_label = _parse_u(args.u)
    n = args.n
    builder = NETWORK_BUILDERS[args.network]
    circuit = builder(n, u, ancilla_control_value=args.control_value)

    layout = SubsystemLayout((2,) * n)
    if args.input is not None:
        digits = tuple(int(c) for c in args.input)
        state = basis_state(layout, digits)
        input_label = args.input
    else:
        state = random_state(layout, np.random.default_rng(args.seed))
        input_label = f"random(seed={args.seed})"

    oracle = direct_controlled_gate(n, u)
    reference = oracle @ state.amps
    records = run_measured(circuit, state, outcome="all")

    print(f"# branches network={args.network} n={n} u={u_label} "
          f"control={args.control_value} input={input_label}")
    print("outcome  probability  phase                  deviation")
    worst = 0.0
    total = 0.0
    for rec in records:
        overlap = complex(np.vdot(reference, rec.post_correction_state.amps))
        expected = expected_global_phase(n, rec.outcome, args.control_value)
        deviation = max(abs(1 - abs(overlap)), abs(rec.global_phase - expected))
        worst = max(worst, deviation)
        total += rec.probability
        print(
            f"{rec.outcome:<8d} {rec.probability:<12.6f} "
            f"{rec.global_phase.real:+.6f}{rec.global_phase.imag:+.6f}j  "
            f"{deviation:.3e}"
        )
    print(f"sum(probability) = {total:.6f}")
    ok = worst < CIRCUIT_TOL and abs(total - 1.0) < 1e-12
    return 0 if ok else 1


def _sweep_lines(args: argparse.Namespace) -> tuple[list[str], float | None]:
    spec = HamiltonianSpec(
        omega=1.0,
        Omega=1.0 + args.delta,
        chi=1.0,
        s=args.spin,
        cutoff=args.cutoff,
    )
    n = spec.n
    if args.g_steps < 1:
        raise ValueError("need at least one coupling step")
    if args.g_steps == 1:
        g_values = [args.g_max]
    else:
        g_values = list(np.geomspace(args.g_max, args.g_min, args.g_steps))
    scan = dispersive_residual(spec, g_values)
    fidelity = gate_fidelity_vs_ideal(spec, n).fidelity
    slope_text = f"{scan.slope:.6f}" if scan.slope is not None else ""
    lines = ["s,n,g,Delta,residual_norm,fitted_slope,fidelity"]
    for g, residual in zip(scan.g_values, scan.residuals):
        lines.append(
            f"{spec.s:g},{n},{g:.12e},{spec.Delta:g},"
            f"{residual:.12e},{slope_text},{fidelity:.12f}"
        )
    return lines, scan.slope


def cmd_sweep(args: argparse.Namespace) -> int:
    lines, slope = _sweep_lines(args)
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        print(f"wrote {args.out}")
    if slope is not None:
        print(f"fitted residual slope: {slope:.3f}")
    else:
        print("fitted residual slope: n/a (single coupling value)")
    return 0


def cmd_emit(args: argparse.Namespace) -> int:
    u, _ = _parse_u(args.u)
    builder = NETWORK_BUILDERS[args.network]
    circuit = builder(args.n, u, ancilla_control_value=args.control_value)
    text = emit_circuit(circuit)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditcat",
        description="Ancilla-catalysed multi-controlled gate networks: "
        "verification, branch enumeration, physics sweeps, circuit files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_network_args(p, networks=("a", "b", "b-z")):
        p.add_argument("--network", choices=networks, default="b")
        p.add_argument("--u", default="x", help="target unitary: x, z, or random:SEED")
        p.add_argument("--control-value", type=int, default=1,
                       help="ancilla digit that fires the target gate")
        p.add_argument("--seed", type=int, default=0)

    p_verify = sub.add_parser("verify", help="check a network against the direct gate")
    add_network_args(p_verify)
    p_verify.add_argument("--n", type=int, default=None,
                          help="qubit count; omit to batch over 2..6")
    p_verify.set_defaults(func=cmd_verify)

    p_branches = sub.add_parser("branches", help="enumerate measurement outcomes")
    add_network_args(p_branches, networks=("b", "b-z"))
    p_branches.add_argument("--n", type=int, required=True)
    p_branches.add_argument("--input", default=None,
                            help="basis input as a digit string, e.g. 111")
    p_branches.set_defaults(func=cmd_branches)

    p_sweep = sub.add_parser("sweep", help="dispersive residual scan to CSV")
    p_sweep.add_argument("--spin", type=float, default=0.5)
    p_sweep.add_argument("--cutoff", type=int, default=8)
    p_sweep.add_argument("--delta", type=float, default=1.0,
                         help="spin-cavity detuning (cavity frequency is 1)")
    p_sweep.add_argument("--g-min", type=float, default=1e-3)
    p_sweep.add_argument("--g-max", type=float, default=1e-2)
    p_sweep.add_argument("--g-steps", type=int, default=5)
    p_sweep.add_argument("--out", default="-", help="CSV path, - for stdout")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.set_defaults(func=cmd_sweep)

    p_emit = sub.add_parser("emit", help="write a network in the circuit text format")
    add_network_args(p_emit)
    p_emit.add_argument("--n", type=int, required=True)
    p_emit.add_argument("--out", default="-", help="file path, - for stdout")
    p_emit.set_defaults(func=cmd_emit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        parser.exit(2, f"error: {exc}\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
