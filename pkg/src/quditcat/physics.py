"""Cavity-QED realization of the controlled clock gate.

The two-body controlled-Z_n needed by the networks can be generated by a
number-spin coupling chi * a^dag a * S_z between a photonic mode and an
effective spin s, where n = 2s + 1 is the qudit dimension.  Evolving for
chi*t = 2*pi/n turns each photon-number block k into the qudit unitary
exp(-i k chi t S_z); the k = 1 block is -omega^{1/2} Z_n, i.e. the clock
gate up to a known phase (omega^{1/2} is taken on the principal branch,
exp(i*pi/n)).

That coupling itself emerges as the dispersive limit of a spin-s extension
of the usual spin-cavity exchange Hamiltonian: transforming
H = w a^dag a + W S_z + 2g (a^dag S_- + a S_+) with V = exp(T),
T = 2g (a S_+ - a^dag S_-) / Delta and Delta = W - w, cancels the exchange
term at first order and leaves

    H' = w a^dag a + W S_z + (4 g^2 / Delta) (S_+ S_- + 2 a^dag a S_z)

up to a remainder of order g^3 / Delta^2.  dispersive_residual checks both
facts numerically: the second-order coefficients and the cubic scaling of
what is left.

The effective spin can also be assembled from n - 1 identical qubits whose
collective half-sum operators reproduce the spin-s algebra on the
permutation-symmetric subspace; collective_spin_from_qubits builds those
operators together with the symmetric-subspace isometry.

Everything is dense numpy with hbar = 1; all frequencies are angular.
Matrix exponentials go through Hermitian (or skew-Hermitian) eigendecomposition
so the results are unitary to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hilbert import pauli_z

__all__ = [
    "PhotonBlockError",
    "SpinOps",
    "FockOps",
    "HamiltonianSpec",
    "ConditionalGateResult",
    "DispersiveScan",
    "CollectiveSpin",
    "GateFidelityReport",
    "spin_operators",
    "fock_operators",
    "interaction_hamiltonian",
    "evolve",
    "extract_conditional_unitary",
    "generalized_jc_hamiltonian",
    "excitation_number",
    "dispersive_generator",
    "dispersive_transform",
    "dispersive_second_order",
    "dispersive_residual",
    "collective_spin_from_qubits",
    "collective_jc_hamiltonian",
    "physical_conditional_z",
    "gate_fidelity_vs_ideal",
]


class PhotonBlockError(RuntimeError):
    """Evolution mixed photon-number blocks that should stay uncoupled."""


@dataclass(frozen=True)
class SpinOps:
    """Matrix representation of a spin s: Sz diagonal, S+/S- ladders.

    Basis index i corresponds to the Sz eigenvalue s - i, so index 0 is the
    highest-weight state.
    """

    s: float
    sz: np.ndarray
    splus: np.ndarray
    sminus: np.ndarray

    @property
    def dim(self) -> int:
        return self.sz.shape[0]


@dataclass(frozen=True)
class FockOps:
    """Truncated photon mode: annihilation, creation, and number operators.

    The canonical commutator [a, a^dag] = 1 holds below the cutoff but is
    broken on the top Fock level by the truncation; comparisons that matter
    should be projected onto low photon numbers.
    """

    cutoff: int
    a: np.ndarray
    adag: np.ndarray

    @property
    def number(self) -> np.ndarray:
        return self.adag @ self.a

    @property
    def dim(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True)
class HamiltonianSpec:
    """Parameters of the spin-cavity models, hbar = 1.

    omega is the cavity frequency, Omega the spin frequency, g the exchange
    coupling, chi the number-spin coupling, s the spin, cutoff the highest
    Fock level kept.
    """

    omega: float = 1.0
    Omega: float = 2.0
    g: float = 0.0
    chi: float = 1.0
    s: float = 0.5
    cutoff: int = 8

    def __post_init__(self) -> None:
        if self.cutoff < 2:
            raise ValueError(f"photon cutoff must be >= 2, got {self.cutoff}")

    @property
    def Delta(self) -> float:
        """Spin-cavity detuning Omega - omega."""
        return self.Omega - self.omega

    @property
    def n(self) -> int:
        """Qudit dimension carried by the spin, 2s + 1."""
        return round(2 * self.s + 1)


def spin_operators(s: float) -> SpinOps:
    """Standard spin-s matrices with Sz = diag(s, s-1, ..., -s)."""
    twice = round(2 * s)
    if abs(2 * s - twice) > 1e-12 or twice < 0:
        raise ValueError(f"spin must be a non-negative half-integer, got {s}")
    dim = twice + 1
    m = s - np.arange(dim)
    sz = np.diag(m).astype(complex)
    splus = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        splus[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    return SpinOps(s=s, sz=sz, splus=splus, sminus=splus.conj().T)


def fock_operators(cutoff: int) -> FockOps:
    """Photon ladder operators truncated at the given Fock level."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    a = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for k in range(1, cutoff + 1):
        a[k - 1, k] = np.sqrt(k)
    return FockOps(cutoff=cutoff, a=a, adag=a.conj().T)


def interaction_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """Number-spin coupling chi * (a^dag a) (x) S_z on photon (x) spin."""
    fock = fock_operators(spec.cutoff)
    spin = spin_operators(spec.s)
    return spec.chi * np.kron(fock.number, spin.sz)


def evolve(h: np.ndarray, t: float) -> np.ndarray:
    """Unitary exp(-i H t) of a Hermitian H via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise ValueError("evolution requires a Hermitian operator")
    energies, vectors = np.linalg.eigh(h)
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def _photon_blocks(u: np.ndarray, photon_dim: int, spin_dim: int, tol: float = 1e-10):
    """Split a photon (x) spin unitary into per-photon-number blocks.

    Raises PhotonBlockError if any weight sits outside the block diagonal.
    """
    view = u.reshape(photon_dim, spin_dim, photon_dim, spin_dim)
    off = 0.0
    blocks = []
    for k in range(photon_dim):
        blocks.append(np.array(view[k, :, k, :]))
    for k in range(photon_dim):
        for kp in range(photon_dim):
            if k != kp:
                off = max(off, float(np.max(np.abs(view[k, :, kp, :]))))
    if off > tol:
        raise PhotonBlockError(f"photon blocks mix with weight {off:.3e}")
    return blocks


@dataclass(frozen=True)
class ConditionalGateResult:
    """Per-photon-number qudit unitaries extracted from the coupling evolution."""

    n: int
    time: float
    block0: np.ndarray
    block1: np.ndarray
    deviation: float


def extract_conditional_unitary(spec: HamiltonianSpec) -> ConditionalGateResult:
    """Evolve the number-spin coupling for chi*t = 2*pi/n and extract blocks.

    Checks that the evolution is block diagonal in photon number, and
    measures how far the one-photon block is from -omega^{1/2} Z_n with
    omega^{1/2} = exp(i*pi/n).
    """
    if spec.chi == 0:
        raise ValueError("chi must be nonzero to generate the conditional gate")
    n = spec.n
    if n < 2:
        raise ValueError(f"spin {spec.s} gives a trivial qudit dimension {n}")
    t = 2 * np.pi / (spec.chi * n)
    u = evolve(interaction_hamiltonian(spec), t)
    blocks = _photon_blocks(u, spec.cutoff + 1, n)
    target = -np.exp(1j * np.pi / n) * pauli_z(n)
    deviation = float(np.max(np.abs(blocks[1] - target)))
    return ConditionalGateResult(
        n=n, time=t, block0=blocks[0], block1=blocks[1], deviation=deviation
    )


def _jc_matrix(omega, Omega, g, fock: FockOps, spin: SpinOps) -> np.ndarray:
    eye_spin = np.eye(spin.dim)
    eye_ph = np.eye(fock.dim)
    return (
        omega * np.kron(fock.number, eye_spin)
        + Omega * np.kron(eye_ph, spin.sz)
        + 2 * g * (np.kron(fock.adag, spin.sminus) + np.kron(fock.a, spin.splus))
    )


def generalized_jc_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """Spin-s exchange Hamiltonian w a^dag a + W S_z + 2g(a^dag S- + a S+)."""
    return _jc_matrix(
        spec.omega, spec.Omega, spec.g, fock_operators(spec.cutoff), spin_operators(spec.s)
    )


def excitation_number(spec: HamiltonianSpec) -> np.ndarray:
    """Conserved total excitation a^dag a + S_z + s, shifted to be >= 0."""
    fock = fock_operators(spec.cutoff)
    spin = spin_operators(spec.s)
    return np.kron(fock.number, np.eye(spin.dim)) + np.kron(
        np.eye(fock.dim), spin.sz + spec.s * np.eye(spin.dim)
    )


def dispersive_generator(spec: HamiltonianSpec) -> np.ndarray:
    """Anti-Hermitian generator T = 2g (a S+ - a^dag S-) / Delta."""
    if spec.Delta == 0:
        raise ValueError("dispersive quantities need a nonzero detuning")
    fock = fock_operators(spec.cutoff)
    spin = spin_operators(spec.s)
    return (
        2
        * spec.g
        / spec.Delta
        * (np.kron(fock.a, spin.splus) - np.kron(fock.adag, spin.sminus))
    )


def dispersive_transform(spec: HamiltonianSpec) -> np.ndarray:
    """V = exp(T) via eigendecomposition of the Hermitian i*T."""
    t = dispersive_generator(spec)
    energies, vectors = np.linalg.eigh(1j * t)
    return (vectors * np.exp(-1j * energies)) @ vectors.conj().T


def dispersive_second_order(spec: HamiltonianSpec) -> np.ndarray:
    """Second-order dispersive Hamiltonian.

    w a^dag a + W S_z + (4 g^2 / Delta)(S+ S- + 2 a^dag a S_z); equal to the
    Baker-Campbell-Hausdorff series of V H V^dag truncated after the
    0.5 [T, [T, H0]] term.
    """
    if spec.Delta == 0:
        raise ValueError("dispersive quantities need a nonzero detuning")
    fock = fock_operators(spec.cutoff)
    spin = spin_operators(spec.s)
    eye_spin = np.eye(spin.dim)
    eye_ph = np.eye(fock.dim)
    shift = 4 * spec.g**2 / spec.Delta
    return (
        spec.omega * np.kron(fock.number, eye_spin)
        + spec.Omega * np.kron(eye_ph, spin.sz)
        + shift
        * (np.kron(eye_ph, spin.splus @ spin.sminus) + 2 * np.kron(fock.number, spin.sz))
    )


def _low_photon_indices(photon_max: int, photon_dim: int, spin_dim: int) -> np.ndarray:
    # Flat indexing is photon-major, so the low-photon block is a prefix.
    return np.arange(min(photon_max + 1, photon_dim) * spin_dim)


@dataclass(frozen=True)
class DispersiveScan:
    """Residual norms of V H V^dag minus the second-order form, per coupling."""

    s: float
    Delta: float
    cutoff: int
    photon_block: int
    g_values: tuple[float, ...]
    residuals: tuple[float, ...]
    slope: float | None


def dispersive_residual(spec: HamiltonianSpec, g_values) -> DispersiveScan:
    """Transform, subtract the second-order form, and fit the leftover scaling.

    The residual is evaluated on the photon <= cutoff/2 block so Fock-space
    truncation artifacts at the top of the ladder do not contaminate it.
    The log-log slope of residual versus g should sit near 3, the order of
    the first neglected term g^3 / Delta^2.
    """
    if spec.Delta == 0:
        raise ValueError("dispersive quantities need a nonzero detuning")
    g_values = tuple(float(g) for g in g_values)
    if not g_values:
        raise ValueError("need at least one coupling value")
    if any(g <= 0 for g in g_values):
        raise ValueError("coupling values must be positive")
    if any(a <= b for a, b in zip(g_values, g_values[1:])):
        raise ValueError("coupling values must be strictly descending")

    spin_dim = spec.n
    photon_max = spec.cutoff // 2
    idx = _low_photon_indices(photon_max, spec.cutoff + 1, spin_dim)
    residuals = []
    for g in g_values:
        spec_g = replace(spec, g=g)
        h = generalized_jc_hamiltonian(spec_g)
        v = dispersive_transform(spec_g)
        residual = v @ h @ v.conj().T - dispersive_second_order(spec_g)
        low = residual[np.ix_(idx, idx)]
        residuals.append(float(np.linalg.norm(low, 2)))

    slope = None
    if len(g_values) >= 2:
        slope = float(
            np.polyfit(np.log(np.array(g_values)), np.log(np.array(residuals)), 1)[0]
        )
    return DispersiveScan(
        s=spec.s,
        Delta=spec.Delta,
        cutoff=spec.cutoff,
        photon_block=photon_max,
        g_values=g_values,
        residuals=tuple(residuals),
        slope=slope,
    )


@dataclass(frozen=True)
class CollectiveSpin:
    """Half-sum qubit operators acting as a spin m/2, plus the Dicke isometry.

    ``isometry`` maps the (m+1)-dimensional spin space into the
    permutation-symmetric subspace of the m qubits; conjugating the
    collective operators with it reproduces spin_operators(m/2) exactly.
    """

    n_qubits: int
    s: float
    sz: np.ndarray
    splus: np.ndarray
    sminus: np.ndarray
    isometry: np.ndarray


def _embed_single_qubit(op: np.ndarray, j: int, m: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for pos in range(m):
        out = np.kron(out, op if pos == j else np.eye(2))
    return out


def collective_spin_from_qubits(m: int) -> CollectiveSpin:
    """Collective spin built from m identical qubits.

    S_z is half the sum of the single-qubit sigma_z; S+/-, the half-sums of
    sigma_x +/- i sigma_y, reduce to sums of single-qubit raising/lowering
    operators.  On the symmetric (Dicke) subspace these realize the spin
    m/2 algebra exactly, which is verified on construction.
    """
    if m < 1:
        raise ValueError(f"need at least one qubit, got {m}")
    sigma_z = np.diag([1.0, -1.0]).astype(complex)
    sigma_plus = np.array([[0, 1], [0, 0]], dtype=complex)  # (sigma_x + i sigma_y)/2
    dim = 2**m
    sz = np.zeros((dim, dim), dtype=complex)
    splus = np.zeros((dim, dim), dtype=complex)
    for j in range(m):
        sz += 0.5 * _embed_single_qubit(sigma_z, j, m)
        splus += _embed_single_qubit(sigma_plus, j, m)
    sminus = splus.conj().T

    # Dicke column r: uniform superposition of all basis states with r qubits
    # in |1>, matching Sz eigenvalue m/2 - r.
    isometry = np.zeros((dim, m + 1), dtype=complex)
    for index in range(dim):
        r = bin(index).count("1")
        isometry[index, r] = 1.0
    isometry /= np.sqrt(np.sum(np.abs(isometry) ** 2, axis=0))

    reference = spin_operators(m / 2)
    for ours, target in (
        (sz, reference.sz),
        (splus, reference.splus),
        (sminus, reference.sminus),
    ):
        projected = isometry.conj().T @ ours @ isometry
        if np.max(np.abs(projected - target)) > 1e-12:
            raise RuntimeError("collective operators do not reduce to the spin algebra")
    return CollectiveSpin(
        n_qubits=m, s=m / 2, sz=sz, splus=splus, sminus=sminus, isometry=isometry
    )


def collective_jc_hamiltonian(spec: HamiltonianSpec, m: int) -> np.ndarray:
    """Exchange Hamiltonian with the spin realized by m collective qubits."""
    collective = collective_spin_from_qubits(m)
    fock = fock_operators(spec.cutoff)
    eye_q = np.eye(2**m)
    eye_ph = np.eye(fock.dim)
    return (
        spec.omega * np.kron(fock.number, eye_q)
        + spec.Omega * np.kron(eye_ph, collective.sz)
        + 2
        * spec.g
        * (
            np.kron(fock.adag, collective.sminus)
            + np.kron(fock.a, collective.splus)
        )
    )


def physical_conditional_z(n: int, time_scale: float = 1.0):
    """Two-body gate on (photonic qubit (x) qudit) from the coupling evolution.

    Returns the 2n x 2n evolved gate restricted to photon numbers {0, 1} and
    the 2 x 2 local phase gate on the photonic control that turns it into an
    exact controlled-Z_n at the nominal evolution time.
    """
    spec = HamiltonianSpec(s=(n - 1) / 2, chi=1.0, cutoff=2)
    t = time_scale * 2 * np.pi / (spec.chi * n)
    u = evolve(interaction_hamiltonian(spec), t)
    blocks = _photon_blocks(u, spec.cutoff + 1, n)
    gate = np.zeros((2 * n, 2 * n), dtype=complex)
    gate[:n, :n] = blocks[0]
    gate[n:, n:] = blocks[1]
    phase = blocks[1][0, 0]
    local_fix = np.diag([1.0, 1.0 / phase]).astype(complex)
    return gate, local_fix


@dataclass(frozen=True)
class GateFidelityReport:
    """How close the evolved conditional gate is to the ideal controlled-Z_n."""

    n: int
    time: float
    block_phases: tuple[complex, complex]
    max_deviation: float
    fidelity: float


def gate_fidelity_vs_ideal(
    spec: HamiltonianSpec, n: int, time_scale: float = 1.0
) -> GateFidelityReport:
    """Evolve the coupling, strip per-block phases, compare to controlled-Z_n.

    ``time_scale`` perturbs the evolution time away from its nominal value
    2*pi/(chi*n); at 1.0 the deviation is limited only by roundoff.
    """
    if spec.n != n:
        raise ValueError(f"spin {spec.s} encodes dimension {spec.n}, not {n}")
    if spec.chi == 0:
        raise ValueError("chi must be nonzero to generate the conditional gate")
    t = time_scale * 2 * np.pi / (spec.chi * n)
    u = evolve(interaction_hamiltonian(spec), t)
    blocks = _photon_blocks(u, spec.cutoff + 1, n)
    ideals = (np.eye(n, dtype=complex), pauli_z(n))
    phases = []
    deviation = 0.0
    fidelity = 1.0
    for block, ideal in zip(blocks[:2], ideals):
        phase = block[0, 0]
        phase /= abs(phase)
        phases.append(complex(phase))
        corrected = block / phase
        deviation = max(deviation, float(np.max(np.abs(corrected - ideal))))
        fidelity = min(
            fidelity, float(abs(np.trace(ideal.conj().T @ corrected)) / n)
        )
    return GateFidelityReport(
        n=n,
        time=t,
        block_phases=(phases[0], phases[1]),
        max_deviation=deviation,
        fidelity=fidelity,
    )
