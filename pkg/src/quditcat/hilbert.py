"""Mixed-radix Hilbert space primitives: layouts, states, and the qudit gate zoo.

Flat-index convention: subsystem 0 is the most significant digit, matching
left-to-right ket notation.  A layout with dims (2, 2, 3) therefore maps the
digit tuple (1, 1, 2) to flat index 1*6 + 1*3 + 2 = 11.

All types are immutable after construction and every operation returns a new
value, so values can be shared freely across threads.

Tolerances are centralized here: UNITARY_TOL guards single-operator
constructions and state normalization, CIRCUIT_TOL guards end-to-end circuit
comparisons where roundoff accumulates over many gate applications.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import NamedTuple

import numpy as np

__all__ = [
    "UNITARY_TOL",
    "CIRCUIT_TOL",
    "SubsystemLayout",
    "StateVector",
    "GateOp",
    "AncillaOverlap",
    "omega",
    "basis_index",
    "digits_of",
    "basis_state",
    "tensor",
    "random_state",
    "random_unitary",
    "identity",
    "pauli_x",
    "pauli_z",
    "fourier",
    "phase_p",
    "apply",
    "ancilla_overlap",
]

# Single-operator construction checks (unitarity, normalization).
UNITARY_TOL = 1e-12
# End-to-end circuit comparisons, where per-gate roundoff accumulates.
CIRCUIT_TOL = 1e-10


def omega(n: int) -> complex:
    """Primitive n-th root of unity, exp(2*pi*i/n)."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return complex(np.exp(2j * np.pi / n))


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered subsystem dimensions defining a mixed-radix index space.

    Subsystem 0 is the most significant digit in the flat-index encoding.
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("layout needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise ValueError(f"every subsystem dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)


def basis_index(digits: tuple[int, ...], layout: SubsystemLayout) -> int:
    """Flat index of a basis state given its per-subsystem digits."""
    if len(digits) != layout.n_subsystems:
        raise ValueError(
            f"expected {layout.n_subsystems} digits, got {len(digits)}"
        )
    index = 0
    for digit, dim in zip(digits, layout.dims):
        if not 0 <= digit < dim:
            raise ValueError(f"digit {digit} out of range for dimension {dim}")
        index = index * dim + digit
    return index


def digits_of(index: int, layout: SubsystemLayout) -> tuple[int, ...]:
    """Per-subsystem digits of a flat basis index (inverse of basis_index)."""
    if not 0 <= index < layout.total_dim:
        raise ValueError(f"index {index} out of range for layout {layout.dims}")
    digits = []
    for dim in reversed(layout.dims):
        digits.append(index % dim)
        index //= dim
    return tuple(reversed(digits))


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitude vector over a SubsystemLayout."""

    layout: SubsystemLayout
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (self.layout.total_dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, "
                f"layout needs ({self.layout.total_dim},)"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > UNITARY_TOL:
            raise ValueError(f"state vector is not normalized: |psi|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)


def basis_state(layout: SubsystemLayout, digits: tuple[int, ...]) -> StateVector:
    """Computational basis state |digits> over the given layout."""
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[basis_index(tuple(digits), layout)] = 1.0
    return StateVector(layout, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state a (x) b; b's subsystems are appended after a's."""
    layout = SubsystemLayout(a.layout.dims + b.layout.dims)
    return StateVector(layout, np.kron(a.amps, b.amps))


def random_state(layout: SubsystemLayout, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state over the layout."""
    z = rng.standard_normal(layout.total_dim) + 1j * rng.standard_normal(layout.total_dim)
    return StateVector(layout, z / np.linalg.norm(z))


def random_unitary(dim: int, seed: int | np.random.Generator) -> np.ndarray:
    """Haar-like random unitary from the QR decomposition of a complex Gaussian."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # Fix the phase freedom of QR so the distribution is Haar.
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _check_unitary(matrix: np.ndarray, what: str) -> None:
    dim = matrix.shape[0]
    deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim)))
    if deviation > UNITARY_TOL:
        raise ValueError(f"{what} is not unitary (deviation {deviation:.3e})")


def identity(n: int) -> np.ndarray:
    """Identity operator on a dim-n space."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return np.eye(n, dtype=complex)


def pauli_x(n: int) -> np.ndarray:
    """Cyclic shift on a dim-n space: X|k> = |k+1 mod n>."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    x = np.roll(np.eye(n, dtype=complex), 1, axis=0)
    _check_unitary(x, f"pauli_x({n})")
    return x


def pauli_z(n: int) -> np.ndarray:
    """Clock operator on a dim-n space: Z|k> = omega^k |k>."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    z = np.diag(omega(n) ** np.arange(n))
    _check_unitary(z, f"pauli_z({n})")
    return z


def fourier(n: int) -> np.ndarray:
    """Fourier transform on a dim-n space: F|k> = n^{-1/2} sum_j omega^{kj} |j>.

    For n = 2 this is the Hadamard gate.  F maps the shift operator to the
    clock operator: F X F^{-1} = Z.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    f = omega(n) ** (j * k) / np.sqrt(n)
    _check_unitary(f, f"fourier({n})")
    return f


def phase_p(n: int, a: int) -> np.ndarray:
    """Qubit phase gate diag(1, omega^a) with omega = exp(2*pi*i/n)."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if a < 0:
        raise ValueError(f"phase power must be >= 0, got {a}")
    p = np.diag([1.0, omega(n) ** a]).astype(complex)
    _check_unitary(p, f"phase_p({n}, {a})")
    return p


@dataclass(frozen=True, eq=False)
class GateOp:
    """A unitary on named subsystems, optionally conditioned on a control digit.

    ``targets[0]`` is the most significant index of the unitary's own basis.
    ``control = (subsystem, k)`` restricts the action to basis states whose
    control digit equals k; all other basis states pass through unchanged.
    ``name`` is an optional label used by the circuit text format.
    """

    unitary: np.ndarray
    targets: tuple[int, ...]
    control: tuple[int, int] | None = None
    name: str | None = None

    def __post_init__(self) -> None:
        unitary = np.array(self.unitary, dtype=complex)
        if unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
            raise ValueError(f"gate unitary must be square, got shape {unitary.shape}")
        _check_unitary(unitary, "gate unitary")
        unitary.setflags(write=False)
        targets = tuple(int(t) for t in self.targets)
        if len(set(targets)) != len(targets):
            raise ValueError(f"duplicate target subsystems: {targets}")
        control = self.control
        if control is not None:
            control = (int(control[0]), int(control[1]))
            if control[0] in targets:
                raise ValueError(
                    f"control subsystem {control[0]} also appears in targets {targets}"
                )
        object.__setattr__(self, "unitary", unitary)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "control", control)


def _apply_on_axes(psi: np.ndarray, unitary: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Apply a dense unitary to the given tensor axes of psi."""
    k = len(axes)
    moved = np.moveaxis(psi, axes, range(k))
    head = moved.shape[:k]
    mat = moved.reshape(prod(head), -1)
    out = (unitary @ mat).reshape(moved.shape)
    return np.moveaxis(out, range(k), axes)


def apply(gate: GateOp, state: StateVector) -> StateVector:
    """Apply a (possibly controlled) gate to a state, returning a new state.

    For a controlled gate, basis components whose control digit differs from
    the control value are returned exactly unchanged; components that match
    get the unitary applied to the target digits.
    """
    layout = state.layout
    dims = layout.dims
    ns = len(dims)
    for t in gate.targets:
        if not 0 <= t < ns:
            raise ValueError(f"target subsystem {t} out of range for layout {dims}")
    target_dim = prod(dims[t] for t in gate.targets)
    if gate.unitary.shape[0] != target_dim:
        raise ValueError(
            f"gate dimension {gate.unitary.shape[0]} does not match "
            f"target dimensions product {target_dim}"
        )
    psi = state.amps.reshape(dims)
    if gate.control is None:
        out = _apply_on_axes(psi, gate.unitary, gate.targets)
    else:
        c, k = gate.control
        if not 0 <= c < ns:
            raise ValueError(f"control subsystem {c} out of range for layout {dims}")
        if not 0 <= k < dims[c]:
            raise ValueError(f"control value {k} out of range for dimension {dims[c]}")
        out = np.array(psi)
        sel = [slice(None)] * ns
        sel[c] = k
        # Target axes shift down by one inside the control-slice view.
        shifted = tuple(t - (t > c) for t in gate.targets)
        out[tuple(sel)] = _apply_on_axes(psi[tuple(sel)], gate.unitary, shifted)
    return StateVector(layout, out.reshape(-1))


class AncillaOverlap(NamedTuple):
    probability: float
    residual: float


def ancilla_overlap(
    state: StateVector, ancilla_index: int, target_digit: int
) -> AncillaOverlap:
    """Probability of reading target_digit on one subsystem, plus the leftover norm.

    ``residual`` is the 2-norm of all amplitude components whose digit on
    ``ancilla_index`` differs from ``target_digit``.  A residual of zero means
    the state factorizes exactly with that subsystem in |target_digit>.
    """
    dims = state.layout.dims
    if not 0 <= ancilla_index < len(dims):
        raise ValueError(f"subsystem {ancilla_index} out of range for layout {dims}")
    if not 0 <= target_digit < dims[ancilla_index]:
        raise ValueError(
            f"digit {target_digit} out of range for dimension {dims[ancilla_index]}"
        )
    psi = state.amps.reshape(dims)
    moved = np.moveaxis(psi, ancilla_index, -1)
    other_axes = tuple(range(len(dims) - 1))
    weights = np.sum(np.abs(moved) ** 2, axis=other_axes)
    probability = float(weights[target_digit])
    residual = float(np.sqrt(max(0.0, float(np.sum(weights)) - probability)))
    return AncillaOverlap(probability, residual)
