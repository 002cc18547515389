"""Dense statevector and unitary simulation over named qubit registers.

Everything is exact linear algebra on complex128 arrays. Measurement is
deterministic projection with a tracked probability; a seeded sampling mode
exists for demos. All values are immutable: operations return new objects,
so concurrent reads are safe.

Conventions: registers are ordered most-significant first, and within a
register qubit 0 is the most significant bit. Control/ancilla registers are
placed before data registers, which makes an encoded block the literal
top-left block of a unitary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import DimensionError

MAX_QUBITS = 14

_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers; the first register holds the most significant qubits."""

    registers: tuple[tuple[str, int], ...]

    @classmethod
    def single(cls, n: int, name: str = "q") -> "RegisterLayout":
        return cls(((name, n),))

    @property
    def num_qubits(self) -> int:
        return sum(k for _, k in self.registers)

    @property
    def dim(self) -> int:
        return 2 ** self.num_qubits

    def width(self, name: str) -> int:
        for reg, k in self.registers:
            if reg == name:
                return k
        raise KeyError(name)

    def offset(self, name: str) -> int:
        off = 0
        for reg, k in self.registers:
            if reg == name:
                return off
            off += k
        raise KeyError(name)

    def qubits(self, name: str) -> tuple[int, ...]:
        off = self.offset(name)
        return tuple(range(off, off + self.width(name)))


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector of length 2^q plus register metadata.

    Sub-normalized states are allowed (projection residues); norms above 1
    are rejected.
    """

    amplitudes: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        amps = np.ascontiguousarray(np.asarray(self.amplitudes, dtype=complex))
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or amps.size != self.layout.dim:
            raise DimensionError(
                f"amplitude vector of length {amps.size} does not match layout dim {self.layout.dim}"
            )
        n2 = float(np.vdot(amps, amps).real)
        if n2 > 1 + 1e-9:
            raise ValueError(f"squared norm {n2} exceeds 1")

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def basis_state(cls, layout: RegisterLayout, index: int = 0) -> "StateVector":
        amps = np.zeros(layout.dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, layout)

    @classmethod
    def zero_state(cls, layout: RegisterLayout) -> "StateVector":
        return cls.basis_state(layout, 0)


@dataclass(frozen=True)
class UnitaryMatrix:
    """Dense 2^q x 2^q matrix with register metadata.

    Unitarity is not enforced at construction (cubic cost); call
    :func:`unitarity_defect` where the invariant matters.
    """

    entries: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        m = np.ascontiguousarray(np.asarray(self.entries, dtype=complex))
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape != (self.layout.dim, self.layout.dim):
            raise DimensionError(
                f"matrix of shape {m.shape} does not match layout dim {self.layout.dim}"
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T, self.layout)

    def unitarity_defect(self) -> float:
        gram = self.entries.conj().T @ self.entries
        gram[np.diag_indices_from(gram)] -= 1.0
        return spectral_norm(gram)


@dataclass(frozen=True)
class Projector:
    """Hermitian idempotent matrix, optionally with fast-apply structure.

    kind "diag" carries a boolean mask over basis states, kind "rank1" a unit
    vector; "dense" falls back to matrix products.
    """

    matrix: np.ndarray
    rank: int
    kind: str = "dense"
    mask: np.ndarray | None = field(default=None, compare=False)
    vector: np.ndarray | None = field(default=None, compare=False)

    @classmethod
    def from_diag_mask(cls, mask: np.ndarray) -> "Projector":
        mask = np.asarray(mask, dtype=bool)
        return cls(np.diag(mask.astype(complex)), int(mask.sum()), "diag", mask=mask)

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "Projector":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), 1, "rank1", vector=v)

    @classmethod
    def ancilla_zero(cls, ancillas: int, data_qubits: int) -> "Projector":
        """|0..0><0..0| on the leading ancilla register, identity on the rest."""
        dim = 2 ** (ancillas + data_qubits)
        mask = np.arange(dim) < 2 ** data_qubits
        return cls.from_diag_mask(mask)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tol: float = 1e-12) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("projector is not Hermitian")
        if np.max(np.abs(m @ m - m)) > tol:
            raise ValueError("projector is not idempotent")

    def apply_vec(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "diag":
            return np.where(self.mask, v, 0.0)
        if self.kind == "rank1":
            return self.vector * np.vdot(self.vector, v)
        return self.matrix @ v

    def left(self, m: np.ndarray) -> np.ndarray:
        """Return P @ m without forming a dense product when structured."""
        if self.kind == "diag":
            out = np.zeros_like(m)
            out[self.mask, :] = m[self.mask, :]
            return out
        if self.kind == "rank1":
            return np.outer(self.vector, self.vector.conj() @ m)
        return self.matrix @ m

    def right(self, m: np.ndarray) -> np.ndarray:
        """Return m @ P."""
        if self.kind == "diag":
            out = np.zeros_like(m)
            out[:, self.mask] = m[:, self.mask]
            return out
        if self.kind == "rank1":
            return np.outer(m @ self.vector, self.vector.conj())
        return m @ self.matrix


@dataclass(frozen=True)
class GateSpec:
    """A named k-local gate: a 2^k x 2^k matrix acting on the listed qubits."""

    name: str
    qubits: tuple[int, ...]
    matrix: np.ndarray


def hadamard(q: int) -> GateSpec:
    return GateSpec("H", (q,), _H)


def pauli_x(q: int) -> GateSpec:
    return GateSpec("X", (q,), _X)


def pauli_y(q: int) -> GateSpec:
    return GateSpec("Y", (q,), _Y)


def pauli_z(q: int) -> GateSpec:
    return GateSpec("Z", (q,), _Z)


def phase_gate(q: int, angle: float) -> GateSpec:
    return GateSpec("PHASE", (q,), np.diag([1.0, np.exp(1j * angle)]))


def cphase(control: int, target: int, angle: float) -> GateSpec:
    return GateSpec(
        "CPHASE", (control, target), np.diag([1.0, 1.0, 1.0, np.exp(1j * angle)])
    )


def unitary_gate(qubits: tuple[int, ...], matrix: np.ndarray, name: str = "U") -> GateSpec:
    matrix = np.asarray(matrix, dtype=complex)
    k = len(qubits)
    if matrix.shape != (2**k, 2**k):
        raise DimensionError(f"gate matrix shape {matrix.shape} does not act on {k} qubits")
    return GateSpec(name, qubits, matrix)


def controlled(matrix: np.ndarray, control: int, targets: tuple[int, ...], name: str = "cU") -> GateSpec:
    """Controlled-U with the control as the leading (most significant) gate qubit."""
    matrix = np.asarray(matrix, dtype=complex)
    k = len(targets)
    dim = 2**k
    if matrix.shape != (dim, dim):
        raise DimensionError(f"target matrix shape {matrix.shape} does not act on {k} qubits")
    big = np.eye(2 * dim, dtype=complex)
    big[dim:, dim:] = matrix
    return GateSpec(name, (control, *targets), big)


def _apply_gate_array(arr: np.ndarray, gate: GateSpec, q: int) -> np.ndarray:
    """Apply a gate to an array whose first q axes are qubit axes.

    Trailing axes (e.g. the column axis of a matrix) are carried along.
    """
    k = len(gate.qubits)
    for t in gate.qubits:
        if not 0 <= t < q:
            raise DimensionError(f"gate {gate.name} targets qubit {t} outside 0..{q - 1}")
    if len(set(gate.qubits)) != k:
        raise DimensionError(f"gate {gate.name} repeats a target qubit")
    op = gate.matrix.reshape((2,) * (2 * k))
    moved = np.tensordot(op, arr, axes=(tuple(range(k, 2 * k)), gate.qubits))
    return np.moveaxis(moved, tuple(range(k)), gate.qubits)


def apply(gate: GateSpec, state: StateVector) -> StateVector:
    """Apply one gate; preserves the norm to machine precision."""
    q = state.num_qubits
    psi = state.amplitudes.reshape((2,) * q)
    psi = _apply_gate_array(psi, gate, q)
    return StateVector(psi.reshape(-1), state.layout)


def apply_circuit(gates: list[GateSpec], state: StateVector) -> StateVector:
    for g in gates:
        state = apply(g, state)
    return state


def circuit_unitary(gates: list[GateSpec], layout: RegisterLayout | int) -> UnitaryMatrix:
    """Exact dense product of the gate matrices, in application order."""
    if isinstance(layout, int):
        layout = RegisterLayout.single(layout)
    q = layout.num_qubits
    if q > MAX_QUBITS:
        raise DimensionError(f"{q} qubits exceeds the dense simulator limit {MAX_QUBITS}")
    dim = layout.dim
    u = np.eye(dim, dtype=complex).reshape((2,) * q + (dim,))
    for g in gates:
        u = _apply_gate_array(u, g, q)
    return UnitaryMatrix(u.reshape(dim, dim), layout)


def projector_phase(proj: Projector, phi: float, state: StateVector) -> StateVector:
    """Apply exp(i*phi*(2P - 1)): phase e^{i phi} on range(P), e^{-i phi} off it."""
    if proj.dim != state.dim:
        raise DimensionError("projector dimension does not match state")
    pv = proj.apply_vec(state.amplitudes)
    amps = np.exp(1j * phi) * pv + np.exp(-1j * phi) * (state.amplitudes - pv)
    return StateVector(amps, state.layout)


def project_measure(proj: Projector, state: StateVector) -> tuple[StateVector, float]:
    """Deterministic post-selection onto range(P) with its success probability.

    Probabilities below 1e-28 return the empty (all-zero) state and 0.0.
    """
    if proj.dim != state.dim:
        raise DimensionError("projector dimension does not match state")
    pv = proj.apply_vec(state.amplitudes)
    nrm = float(np.linalg.norm(pv))
    if nrm < 1e-14:
        return StateVector(np.zeros_like(pv), state.layout), 0.0
    return StateVector(pv / nrm, state.layout), nrm**2


def sample_projective(
    proj: Projector, state: StateVector, seed: int = 0
) -> tuple[StateVector, bool]:
    """Seeded sampling variant of project_measure, for demos."""
    rng = np.random.default_rng(seed)
    post, p = project_measure(proj, state)
    if rng.random() < p:
        return post, True
    rest = state.amplitudes - proj.apply_vec(state.amplitudes)
    nrm = np.linalg.norm(rest)
    if nrm < 1e-14:
        return StateVector(np.zeros_like(rest), state.layout), False
    return StateVector(rest / nrm, state.layout), False


def spectral_norm(m: np.ndarray, rtol: float = 1e-12, max_iter: int = 20000, seed: int = 7) -> float:
    """Largest singular value via power iteration on M^dag M."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m.shape[1]) + 1j * rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    lam_prev = 0.0
    for _ in range(max_iter):
        w = m @ v
        u = m.conj().T @ w
        lam = float(np.vdot(v, u).real)
        nrm = np.linalg.norm(u)
        if nrm < 1e-150:
            return 0.0
        v = u / nrm
        if abs(lam - lam_prev) <= rtol * abs(lam) + 1e-300:
            break
        lam_prev = lam
    return sqrt(max(lam, 0.0))


def state_dist(a: StateVector, b: StateVector) -> float:
    """Euclidean distance between amplitude vectors."""
    if a.dim != b.dim:
        raise DimensionError("states have different dimensions")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def op_dist(a: np.ndarray | UnitaryMatrix, b: np.ndarray | UnitaryMatrix) -> float:
    """Spectral-norm distance between operators."""
    ma = a.entries if isinstance(a, UnitaryMatrix) else np.asarray(a, dtype=complex)
    mb = b.entries if isinstance(b, UnitaryMatrix) else np.asarray(b, dtype=complex)
    if ma.shape != mb.shape:
        raise DimensionError("operators have different shapes")
    return spectral_norm(ma - mb)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Overlap magnitude |<a|b>|."""
    if a.dim != b.dim:
        raise DimensionError("states have different dimensions")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))
