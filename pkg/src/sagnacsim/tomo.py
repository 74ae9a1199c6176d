"""State tomography from simulated counts, for one or two qubits.

Two reconstruction routes are kept deliberately distinct: linear inversion
returns exactly what the Pauli estimates imply, including slightly negative
eigenvalues at low shots (reported, never clamped away), while the
maximum-likelihood route parametrizes rho = T^dag T / tr(T^dag T) with a
lower-triangular T, so positivity holds by construction, and maximizes the
multinomial likelihood of the observed counts with an analytic gradient.
"""

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import counts as counts_mod
from .hilbert import (
    DensityMatrix,
    PauliString,
    StateVector,
    _BASIS_ROTATIONS,
    fidelity,
    measurement_distribution,
)

_P_FLOOR = 1e-12
ML_FTOL = 1e-9
ML_MAX_ITER = 10_000


def complete_settings(num_qubits: int):
    """All per-qubit basis choices: 3 settings for 1 qubit, 9 for 2."""
    return tuple("".join(c) for c in itertools.product("XYZ", repeat=num_qubits))


@dataclass(frozen=True)
class TomographyInput:
    """One CountRecord per basis setting, covering the full setting set."""

    num_qubits: int
    records: dict

    def __post_init__(self):
        expected = set(complete_settings(self.num_qubits))
        missing = expected - set(self.records)
        if missing:
            raise ValueError(f"incomplete tomography settings, missing {sorted(missing)}")
        for setting in expected:
            if self.records[setting].total == 0:
                raise ValueError(f"setting {setting!r} has zero counts")

    def to_json(self) -> str:
        return json.dumps(
            {
                "num_qubits": self.num_qubits,
                "records": {
                    s: json.loads(self.records[s].to_json())
                    for s in complete_settings(self.num_qubits)
                },
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TomographyInput":
        data = json.loads(text)
        records = {
            s: counts_mod.CountRecord.from_json(json.dumps(r))
            for s, r in data["records"].items()
        }
        return cls(num_qubits=int(data["num_qubits"]), records=records)


def simulate_tomography(state, shots: int, seed: int) -> TomographyInput:
    """Sample counts for every basis setting of the state's register."""
    n = state.num_qubits
    records = {}
    for index, setting in enumerate(complete_settings(n)):
        dist = measurement_distribution(state, setting)
        records[setting] = counts_mod.sample(
            dist, shots, counts_mod.derived_seed(seed, index), setting=setting
        )
    return TomographyInput(num_qubits=n, records=records)


def exact_tomography(state, shots: int = 1) -> TomographyInput:
    """Noiseless pseudo-counts proportional to the exact probabilities
    (useful for round-trip checks; shots scales the integer resolution)."""
    n = state.num_qubits
    records = {}
    scale = 10**9
    for setting in complete_settings(n):
        dist = measurement_distribution(state, setting)
        counts = {o: int(round(p * scale)) for o, p in dist.items()}
        records[setting] = counts_mod.CountRecord(
            setting=setting, outcome_counts=counts,
            shots=sum(counts.values()), seed=0,
        )
    return TomographyInput(num_qubits=n, records=records)


@dataclass
class ReconstructionResult:
    rho: DensityMatrix
    method: str
    log_likelihood: float | None = None
    fidelity_vs_target: float | None = None
    min_eigenvalue: float = 0.0
    converged: bool = True
    iterations: int = 0
    nll_trace: tuple = ()

    def to_json(self) -> str:
        mat = self.rho.matrix
        interleaved = []
        for value in mat.reshape(-1):
            interleaved.extend([value.real, value.imag])
        return json.dumps(
            {
                "rho": interleaved,
                "dim": mat.shape[0],
                "method": self.method,
                "log_likelihood": self.log_likelihood,
                "fidelity": self.fidelity_vs_target,
                "min_eigenvalue": self.min_eigenvalue,
                "converged": self.converged,
            }
        )


def _pauli_estimate(record, positions, num_qubits):
    """Parity estimator of the Pauli supported on ``positions``."""
    eigenvalues = {}
    for outcome in record.outcome_counts:
        parity = sum(int(outcome[p]) for p in positions) % 2
        eigenvalues[outcome] = -1.0 if parity else 1.0
    value, _ = counts_mod.expectation_from_counts(record, eigenvalues)
    return value


def linear_reconstruct(data: TomographyInput, register=None) -> ReconstructionResult:
    """rho = (1/2^n) sum_P <P> P from averaged Pauli estimates.

    The result is Hermitian with unit trace but may carry small negative
    eigenvalues from sampling noise; they are surfaced in min_eigenvalue.
    """
    n = data.num_qubits
    register = _default_register(n) if register is None else tuple(register)
    dim = 2**n
    rho = np.eye(dim, dtype=complex)  # the identity term, <I..I> = 1
    for labels in itertools.product("IXYZ", repeat=n):
        labels = "".join(labels)
        if labels == "I" * n:
            continue
        support = [i for i, lab in enumerate(labels) if lab != "I"]
        estimates = [
            _pauli_estimate(data.records[setting], support, n)
            for setting in complete_settings(n)
            if all(setting[i] == labels[i] for i in support)
        ]
        rho += float(np.mean(estimates)) * PauliString(labels).to_matrix()
    rho /= dim
    rho = DensityMatrix(register, rho, allow_nonpositive=True)
    return ReconstructionResult(
        rho=rho,
        method="linear",
        log_likelihood=log_likelihood(data, rho),
        min_eigenvalue=rho.min_eigenvalue(),
    )


def _setting_vectors(setting: str):
    """Projection kets |phi_{s,o}> = U_s^dag |o> for every outcome."""
    rotation = np.array([[1]], dtype=complex)
    for axis in setting:
        rotation = np.kron(rotation, _BASIS_ROTATIONS[axis])
    return rotation.conj().T


def log_likelihood(data: TomographyInput, rho) -> float:
    """Multinomial log-likelihood of the counts under ``rho``."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    total = 0.0
    for setting, record in data.records.items():
        kets = _setting_vectors(setting)
        for outcome, n_obs in record.outcome_counts.items():
            if n_obs == 0:
                continue
            ket = kets[:, int(outcome, 2)]
            p = max(float(np.real(np.vdot(ket, mat @ ket))), _P_FLOOR)
            total += n_obs * math.log(p)
    return total


def _t_from_params(t: np.ndarray, dim: int) -> np.ndarray:
    T = np.zeros((dim, dim), dtype=complex)
    k = 0
    for i in range(dim):
        T[i, i] = t[k]
        k += 1
    for i in range(dim):
        for j in range(i):
            T[i, j] = t[k] + 1j * t[k + 1]
            k += 2
    return T


def _params_from_t(T: np.ndarray) -> np.ndarray:
    dim = T.shape[0]
    t = [T[i, i].real for i in range(dim)]
    for i in range(dim):
        for j in range(i):
            t.extend([T[i, j].real, T[i, j].imag])
    return np.array(t, dtype=float)


def _nll_and_grad(t: np.ndarray, dim: int, projheap):
    T = _t_from_params(t, dim)
    gram = T.conj().T @ T
    tau = float(np.trace(gram).real)
    rho = gram / tau
    nll = 0.0
    G = np.zeros((dim, dim), dtype=complex)
    for ket, n_obs in projheap:
        p = max(float(np.real(np.vdot(ket, rho @ ket))), _P_FLOOR)
        nll -= n_obs * math.log(p)
        G += (n_obs / p) * np.outer(ket, ket.conj())
    c = float(np.real(np.trace(rho @ G)))
    M = T @ (G - c * np.eye(dim))
    grad = np.zeros_like(t)
    k = 0
    for i in range(dim):
        grad[k] = -2.0 / tau * M[i, i].real
        k += 1
    for i in range(dim):
        for j in range(i):
            grad[k] = -2.0 / tau * M[i, j].real
            grad[k + 1] = -2.0 / tau * M[i, j].imag
            k += 2
    return nll, grad


def clamp_to_physical(rho: DensityMatrix, floor: float = 1e-6) -> DensityMatrix:
    """Eigenvalue-floored, renormalized copy; identity on already-physical
    input (up to the floor). This is the ML starting point, and the anchor of
    its likelihood guarantee."""
    eigvals, eigvecs = np.linalg.eigh(rho.matrix)
    eigvals = np.clip(eigvals, floor, None)
    repaired = (eigvecs * eigvals) @ eigvecs.conj().T
    repaired /= np.trace(repaired).real
    return DensityMatrix(rho.register, repaired)


def _clamped_cholesky_start(data: TomographyInput, dim: int) -> np.ndarray:
    repaired = clamp_to_physical(linear_reconstruct(data).rho).matrix
    # rho = T^dag T with T lower triangular is the Cholesky factorization of
    # the index-reversed matrix: with J the exchange matrix and J rho J =
    # L L^dag, the factor T = (J L J)^dag is lower triangular as required.
    exchange = np.fliplr(np.eye(dim))
    L = np.linalg.cholesky(exchange @ repaired @ exchange)
    return _params_from_t((exchange @ L @ exchange).conj().T)


def ml_reconstruct(data: TomographyInput, register=None) -> ReconstructionResult:
    """Maximum-likelihood reconstruction over rho = T^dag T / tr(T^dag T).

    Starts from the positivity-repaired linear result, so the final
    likelihood can only improve on it. Convergence: relative log-likelihood
    change below 1e-9 or 10^4 iterations (non-convergence is flagged, with
    the best iterate returned).
    """
    n = data.num_qubits
    register = _default_register(n) if register is None else tuple(register)
    dim = 2**n
    projheap = []
    for setting, record in data.records.items():
        kets = _setting_vectors(setting)
        for outcome, n_obs in record.outcome_counts.items():
            if n_obs > 0:
                projheap.append((kets[:, int(outcome, 2)].copy(), n_obs))

    t0 = _clamped_cholesky_start(data, dim)
    trace = [float(_nll_and_grad(t0, dim, projheap)[0])]

    def record_iterate(tk):
        trace.append(float(_nll_and_grad(tk, dim, projheap)[0]))

    res = minimize(
        _nll_and_grad,
        t0,
        args=(dim, projheap),
        jac=True,
        method="L-BFGS-B",
        callback=record_iterate,
        options={"ftol": ML_FTOL, "gtol": 1e-12, "maxiter": ML_MAX_ITER},
    )
    T = _t_from_params(res.x, dim)
    gram = T.conj().T @ T
    rho = DensityMatrix(register, gram / np.trace(gram).real)
    return ReconstructionResult(
        rho=rho,
        method="max_likelihood",
        log_likelihood=-float(res.fun),
        min_eigenvalue=rho.min_eigenvalue(),
        converged=bool(res.success),
        iterations=int(res.nit),
        nll_trace=tuple(trace),
    )


def fidelity_report(result: ReconstructionResult, target: StateVector) -> float:
    """<target|rho|target>, attached to the result."""
    value = float(
        np.real(np.vdot(target.amplitudes, result.rho.matrix @ target.amplitudes))
    )
    result.fidelity_vs_target = value
    return value


def trace_distance(rho_a, rho_b) -> float:
    """(1/2) tr |rho_a - rho_b|, for comparing the two reconstruction routes."""
    mat_a = rho_a.matrix if isinstance(rho_a, DensityMatrix) else np.asarray(rho_a)
    mat_b = rho_b.matrix if isinstance(rho_b, DensityMatrix) else np.asarray(rho_b)
    eigvals = np.linalg.eigvalsh(mat_a - mat_b)
    return float(0.5 * np.abs(eigvals).sum())


def _default_register(num_qubits: int):
    from .hilbert import CPHASE_REGISTER, DICKE_REGISTER

    if num_qubits == 1:
        return (CPHASE_REGISTER[1],)
    if num_qubits == 2:
        return CPHASE_REGISTER
    return DICKE_REGISTER[:num_qubits]
