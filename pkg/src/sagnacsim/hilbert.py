"""Dense linear algebra over small labeled qubit registers.

States are complex amplitude vectors over at most 4 qubits (dimension 16),
ordered big-endian: the first register slot is the most significant bit.
Logical encodings are fixed once and for all: H->0/V->1 (polarization),
r->0/l->1 (path), clockwise->0/counterclockwise->1 (Sagnac loop).
All values are immutable after construction; operations are pure.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

NORM_TOL = 1e-12
HERM_TOL = 1e-10
EIG_TOL = 1e-8


class RegisterError(ValueError):
    """Address collision, unknown address, or register/dimension mismatch."""


class Photon(str, Enum):
    A = "A"
    B = "B"


class Dof(str, Enum):
    PATH = "path"
    POLARIZATION = "polarization"
    SAGNAC = "sagnac"


@dataclass(frozen=True)
class QubitAddress:
    """One physical qubit: which photon, which degree of freedom."""

    photon: Photon
    dof: Dof
    logical_index: int

    def __str__(self):
        short = {Dof.PATH: "path", Dof.POLARIZATION: "pol", Dof.SAGNAC: "sagnac"}
        return f"{self.photon.value}.{short[self.dof]}"


# Fixed register layouts. Dicke register: 1=(A,path), 2=(A,pol), 3=(B,path),
# 4=(B,pol). C-Phase register: 1=(B,path before the second splitter), 2=(B,sagnac).
DICKE_REGISTER = (
    QubitAddress(Photon.A, Dof.PATH, 1),
    QubitAddress(Photon.A, Dof.POLARIZATION, 2),
    QubitAddress(Photon.B, Dof.PATH, 3),
    QubitAddress(Photon.B, Dof.POLARIZATION, 4),
)
CPHASE_REGISTER = (
    QubitAddress(Photon.B, Dof.PATH, 1),
    QubitAddress(Photon.B, Dof.SAGNAC, 2),
)

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _frozen_array(values, shape=None):
    arr = np.array(values, dtype=complex)
    if shape is not None and arr.shape != shape:
        raise RegisterError(f"expected array of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_register(register):
    register = tuple(register)
    if len(set(register)) != len(register):
        raise RegisterError(f"register contains duplicate addresses: {register}")
    return register


@dataclass(frozen=True)
class StateVector:
    """Unit-norm amplitude vector over an ordered qubit register."""

    register: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        register = _check_register(self.register)
        amps = _frozen_array(self.amplitudes, shape=(2 ** len(register),))
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise RegisterError(f"state vector norm {norm} differs from 1")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self):
        return len(self.register)

    def position(self, address):
        try:
            return self.register.index(address)
        except ValueError:
            raise RegisterError(f"address {address} not in register") from None

    def amplitude(self, bits: str) -> complex:
        """Amplitude of the logical basis ket written as a bit string."""
        if len(bits) != self.num_qubits:
            raise RegisterError(f"bit string {bits!r} has wrong length")
        return complex(self.amplitudes[int(bits, 2)])

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.register, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace operator on a labeled register.

    Positivity is enforced up to -1e-8 on the smallest eigenvalue unless
    ``allow_nonpositive`` is set (linear tomographic inversion legitimately
    produces slightly unphysical matrices that must be reported as-is).
    """

    register: tuple
    matrix: np.ndarray
    allow_nonpositive: bool = False

    def __post_init__(self):
        register = _check_register(self.register)
        dim = 2 ** len(register)
        mat = _frozen_array(self.matrix, shape=(dim, dim))
        if not np.allclose(mat, mat.conj().T, atol=HERM_TOL):
            raise RegisterError("density matrix is not Hermitian")
        trace = np.trace(mat).real
        if abs(trace - 1.0) > HERM_TOL:
            raise RegisterError(f"density matrix trace {trace} differs from 1")
        if not self.allow_nonpositive:
            min_eig = float(np.linalg.eigvalsh(mat)[0])
            if min_eig < -EIG_TOL:
                raise RegisterError(f"density matrix has negative eigenvalue {min_eig}")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "matrix", mat)

    @property
    def num_qubits(self):
        return len(self.register)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, one label per register slot."""

    labels: str

    def __post_init__(self):
        bad = set(self.labels) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli labels {bad} in {self.labels!r}")

    def __len__(self):
        return len(self.labels)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix by Kronecker composition (first slot most significant)."""
        out = np.array([[1]], dtype=complex)
        for lab in self.labels:
            out = np.kron(out, _PAULI_1Q[lab])
        return out

    def act(self, amplitudes: np.ndarray) -> np.ndarray:
        """Apply by bit manipulation, independent of the matrix build.

        X flips the bit, Z signs it, Y does both with the +/-i phases.
        """
        n = len(self.labels)
        if amplitudes.shape != (2**n,):
            raise RegisterError("Pauli string length does not match state dimension")
        src = np.arange(2**n)
        dst = src.copy()
        phase = np.ones(2**n, dtype=complex)
        for pos, lab in enumerate(self.labels):
            mask = 1 << (n - 1 - pos)
            bit = (src & mask) != 0
            if lab == "X":
                dst = dst ^ mask
            elif lab == "Y":
                dst = dst ^ mask
                phase = phase * np.where(bit, -1j, 1j)
            elif lab == "Z":
                phase = phase * np.where(bit, -1.0, 1.0)
        out = np.zeros_like(amplitudes)
        out[dst] = phase * amplitudes[src]
        return out


def tensor(parts) -> StateVector:
    """Kronecker-compose states on disjoint registers, in concatenation order."""
    parts = list(parts)
    if not parts:
        raise RegisterError("tensor of zero states")
    register = []
    for part in parts:
        register.extend(part.register)
    if len(set(register)) != len(register):
        raise RegisterError("tensor parts share qubit addresses")
    amps = parts[0].amplitudes
    for part in parts[1:]:
        amps = np.kron(amps, part.amplitudes)
    return StateVector(tuple(register), amps)


def permute(state: StateVector, new_register) -> StateVector:
    """Reorder register slots (same qubits, new order)."""
    new_register = tuple(new_register)
    if set(new_register) != set(state.register):
        raise RegisterError("permute must keep the same set of addresses")
    n = state.num_qubits
    axes = [state.position(addr) for addr in new_register]
    amps = state.amplitudes.reshape([2] * n).transpose(axes).reshape(-1)
    return StateVector(new_register, amps)


def apply(op: np.ndarray, targets, state: StateVector) -> StateVector:
    """Apply ``op`` to the target qubits, identity elsewhere.

    ``op`` is a 2^k x 2^k matrix over the targets in the order given
    (first target = most significant bit of the operator's own index).
    """
    targets = list(targets)
    k = len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**k, 2**k):
        raise RegisterError(f"operator shape {op.shape} does not match {k} target(s)")
    positions = [state.position(t) for t in targets]
    n = state.num_qubits
    psi = state.amplitudes.reshape([2] * n)
    op_t = op.reshape([2] * (2 * k))
    out = np.tensordot(op_t, psi, axes=(list(range(k, 2 * k)), positions))
    out = np.moveaxis(out, list(range(k)), positions)
    return StateVector(state.register, out.reshape(-1))


def operator_on(op: np.ndarray, targets, register) -> np.ndarray:
    """Embed ``op`` on targets into the full register as a dense matrix."""
    register = tuple(register)
    dim = 2 ** len(register)
    out = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for col in range(dim):
        basis = StateVector(register, eye[col])
        out[:, col] = apply(op, targets, basis).amplitudes
    return out


def conjugate(op: np.ndarray, targets, rho: DensityMatrix) -> DensityMatrix:
    """Evolve a density matrix by ``op`` on the targets: U rho U^dag."""
    full = operator_on(op, targets, rho.register)
    return DensityMatrix(
        rho.register, full @ rho.matrix @ full.conj().T,
        allow_nonpositive=rho.allow_nonpositive,
    )


def expectation(obs, state) -> float:
    """Real expectation value of a Pauli string or dense Hermitian operator."""
    if isinstance(obs, PauliString):
        if len(obs) != state.num_qubits:
            raise RegisterError("observable length does not match register")
        if isinstance(state, StateVector):
            val = np.vdot(state.amplitudes, obs.act(state.amplitudes))
        else:
            val = np.trace(state.matrix @ obs.to_matrix())
    else:
        op = np.asarray(obs, dtype=complex)
        dim = 2**state.num_qubits
        if op.shape != (dim, dim):
            raise RegisterError(f"operator shape {op.shape} does not match register")
        if isinstance(state, StateVector):
            val = np.vdot(state.amplitudes, op @ state.amplitudes)
        else:
            val = np.trace(state.matrix @ op)
    return float(val.real)


def fidelity(rho, target: StateVector) -> float:
    """<target|rho|target>, or |<target|psi>|^2 for a pure state argument."""
    if tuple(rho.register) != tuple(target.register):
        raise RegisterError("fidelity requires matching registers")
    if isinstance(rho, StateVector):
        return float(abs(np.vdot(target.amplitudes, rho.amplitudes)) ** 2)
    val = np.vdot(target.amplitudes, rho.matrix @ target.amplitudes)
    return float(val.real)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix on the kept addresses (in the order given)."""
    keep = list(keep)
    if not keep:
        raise RegisterError("partial_trace with empty keep list")
    n = rho.num_qubits
    keep_pos = []
    for addr in keep:
        if addr not in rho.register:
            raise RegisterError(f"address {addr} not in register")
        keep_pos.append(rho.register.index(addr))
    lose_pos = [i for i in range(n) if i not in keep_pos]
    tensor_form = rho.matrix.reshape([2] * (2 * n))
    perm = keep_pos + lose_pos + [p + n for p in keep_pos] + [p + n for p in lose_pos]
    tensor_form = tensor_form.transpose(perm)
    dk, dl = 2 ** len(keep_pos), 2 ** len(lose_pos)
    tensor_form = tensor_form.reshape(dk, dl, dk, dl)
    reduced = np.einsum("abcb->ac", tensor_form)
    return DensityMatrix(tuple(keep), reduced, allow_nonpositive=rho.allow_nonpositive)


# Basis-change rotations: measuring axis A in the computational basis after
# the rotation is the same as measuring A directly (|+> -> |0>, |+i> -> |0>).
_BASIS_ROTATIONS = {
    "Z": np.eye(2, dtype=complex),
    "X": HADAMARD,
    "Y": HADAMARD @ np.diag([1.0, -1.0j]),
}


def measurement_distribution(state, axes: str) -> dict:
    """Outcome probabilities for measuring each qubit along its axis.

    ``axes`` holds one of X/Y/Z per register slot, or I for qubits left
    unmeasured (marginalized away). Keys are bit strings over the measured
    qubits in register order; bit 0 is the +1 eigenstate.
    """
    n = state.num_qubits
    if len(axes) != n:
        raise RegisterError("axes string length does not match register")
    measured = [i for i, a in enumerate(axes) if a != "I"]
    if not measured:
        raise RegisterError("no measured qubits in axes string")
    rotation = np.array([[1]], dtype=complex)
    for a in axes:
        rotation = np.kron(rotation, _BASIS_ROTATIONS.get(a, _BASIS_ROTATIONS["Z"]))
    if isinstance(state, StateVector):
        probs = np.abs(rotation @ state.amplitudes) ** 2
    else:
        probs = np.diag(rotation @ state.matrix @ rotation.conj().T).real
    probs = probs.reshape([2] * n)
    unmeasured = tuple(i for i in range(n) if i not in measured)
    if unmeasured:
        probs = probs.sum(axis=unmeasured)
    probs = probs.reshape(-1)
    width = len(measured)
    return {format(i, f"0{width}b"): float(p) for i, p in enumerate(probs)}


def basis_state(register, bits: str) -> StateVector:
    """Computational basis ket |bits> on the register."""
    register = tuple(register)
    if len(bits) != len(register):
        raise RegisterError(f"bit string {bits!r} has wrong length for register")
    amps = np.zeros(2 ** len(register), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(register, amps)


def single_qubit_state(address, alpha, beta) -> StateVector:
    """alpha|0> + beta|1> on one labeled qubit (normalized by the caller)."""
    return StateVector((address,), np.array([alpha, beta], dtype=complex))
