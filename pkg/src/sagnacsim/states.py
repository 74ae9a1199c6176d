"""Ideal state factories and the plate/splitter pipeline producing the
4-qubit phased Dicke state from its three-term seed state.

Register order is fixed to logical indices 1..4 = (A.path, A.pol, B.path,
B.pol); big-endian, so the ket |0010> puts qubit 3 in |1>.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import elements
from .hilbert import (
    DICKE_REGISTER,
    DensityMatrix,
    StateVector,
)

_TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class PhaseParams:
    """Relative phases of the two-pair source: ``gamma`` between the HH and
    VV polarization terms, ``delta`` between the rl and lr momentum terms."""

    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", self.gamma % _TWO_PI)
        object.__setattr__(self, "delta", self.delta % _TWO_PI)


class DickePair(NamedTuple):
    symmetric: StateVector
    phased: StateVector


def he_state(params: PhaseParams = PhaseParams()) -> StateVector:
    """Hyperentangled two-pair state: (|HH>+e^{ig}|VV>) x (|rl>+e^{id}|lr>) / 2."""
    pol = [(0, 0, 1.0), (1, 1, np.exp(1j * params.gamma))]
    mom = [(0, 1, 1.0), (1, 0, np.exp(1j * params.delta))]
    amps = np.zeros(16, dtype=complex)
    for b2, b4, pol_amp in pol:
        for b1, b3, mom_amp in mom:
            amps[b1 * 8 + b2 * 4 + b3 * 2 + b4] = pol_amp * mom_amp / 2
    return StateVector(DICKE_REGISTER, amps)


def xi_state() -> StateVector:
    """Seed state (1/sqrt6)(|0010> - |1000> + 2|0111>) for the Dicke pipeline."""
    amps = np.zeros(16, dtype=complex)
    amps[0b0010] = 1.0
    amps[0b1000] = -1.0
    amps[0b0111] = 2.0
    return StateVector(DICKE_REGISTER, amps / math.sqrt(6))


def xi_state_via_source(delta: float = math.pi):
    """Build the seed state the way the modified source does: start from the
    1:2-weighted two-pair emission and intercept the V-cone's populated
    left-A / right-B modes with beam stops.

    Returns (state, survival probability). With the default momentum phase
    delta=pi the result matches xi_state() exactly and 60% of the amplitude
    survives the stops.
    """
    pol = [(0, 0, 1.0), (1, 1, 2.0)]  # |HH> + 2|VV>, weight set by the pump-side plate
    mom = [(0, 1, 1.0), (1, 0, np.exp(1j * delta))]
    amps = np.zeros(16, dtype=complex)
    for b2, b4, pol_amp in pol:
        for b1, b3, mom_amp in mom:
            amps[b1 * 8 + b2 * 4 + b3 * 2 + b4] = pol_amp * mom_amp
    state = StateVector(DICKE_REGISTER, amps / np.linalg.norm(amps))
    q1, q2, q3, q4 = DICKE_REGISTER
    # Stop the l mode of photon A and the r mode of photon B, V cone only.
    state, prob_a = elements.project_out(q1, 1, state, when=(q2, 1))
    state, prob_b = elements.project_out(q3, 0, state, when=(q4, 1))
    return state, prob_a * prob_b


def dicke_states() -> DickePair:
    """The 2-excitation Dicke state and its phased variant (signs flipped on
    |0101> and |1010>, i.e. dressed with Z on qubits 1 and 3)."""
    kets = ["0011", "1100", "0110", "1001", "0101", "1010"]
    sym = np.zeros(16, dtype=complex)
    phased = np.zeros(16, dtype=complex)
    for ket in kets:
        sym[int(ket, 2)] = 1.0
        phased[int(ket, 2)] = -1.0 if ket in ("0101", "1010") else 1.0
    root6 = math.sqrt(6)
    return DickePair(
        symmetric=StateVector(DICKE_REGISTER, sym / root6),
        phased=StateVector(DICKE_REGISTER, phased / root6),
    )


def dicke_pipeline_elements():
    """The element sequence mapping the seed state to the phased Dicke state,
    in application order: the splitter Hadamards on both path qubits, the
    45deg plates in the l modes (CX, path controlling polarization), the
    0deg plates in the r modes (the compensating CZbar), and the final 0deg
    plate on B's polarization."""
    q1, q2, q3, q4 = DICKE_REGISTER
    hwp = elements.ElementKind.HWP
    return [
        elements.OpticalElement(elements.ElementKind.BS, on=q1),
        elements.OpticalElement(elements.ElementKind.BS, on=q3),
        elements.OpticalElement(hwp, on=q2, angle=math.radians(45), when=(q1, 1)),
        elements.OpticalElement(hwp, on=q4, angle=math.radians(45), when=(q3, 1)),
        elements.OpticalElement(hwp, on=q2, angle=0.0, when=(q1, 0)),
        elements.OpticalElement(hwp, on=q4, angle=0.0, when=(q3, 0)),
        elements.OpticalElement(hwp, on=q4, angle=0.0),
    ]


def generate_phased_dicke_via_circuit(skip_compensation: bool = False) -> StateVector:
    """Run the seed state through the plate/splitter pipeline.

    ``skip_compensation`` drops the two 0deg conditioned plates, reproducing
    the sign errors the physical delay compensation exists to fix.
    """
    state = xi_state()
    for element in dicke_pipeline_elements():
        if skip_compensation and element.when is not None and element.angle == 0.0:
            continue
        state = elements.apply_element(element, state)
    return state


def add_white_noise(state: StateVector, p: float) -> DensityMatrix:
    """Depolarized mixture p * I/2^n + (1-p) |psi><psi|."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise fraction must be in [0, 1], got {p}")
    dim = 2**state.num_qubits
    rho = p * np.eye(dim) / dim + (1 - p) * np.outer(
        state.amplitudes, state.amplitudes.conj()
    )
    return DensityMatrix(state.register, rho)


def add_dephasing(state, lam: float) -> DensityMatrix:
    """Alternative noise model: each qubit independently dephased,
    rho -> (1-lam) rho + lam Z rho Z per qubit."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"dephasing strength must be in [0, 1], got {lam}")
    if isinstance(state, StateVector):
        rho = state.to_density_matrix()
    else:
        rho = state
    n = rho.num_qubits
    mat = rho.matrix.copy()
    for pos in range(n):
        idx = np.arange(2**n)
        signs = np.where(((idx >> (n - 1 - pos)) & 1) == 1, -1.0, 1.0)
        z_rho_z = mat * np.outer(signs, signs)
        mat = (1 - lam) * mat + lam * z_rho_z
    return DensityMatrix(rho.register, mat)


_FACTORIES = {
    "he": lambda: he_state(),
    "xi": xi_state,
    "dicke": lambda: dicke_states().symmetric,
    "phased-dicke": lambda: dicke_states().phased,
}


def state_by_name(name: str) -> StateVector:
    """Factory lookup used by the command-line front end."""
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise ValueError(
            f"unknown state {name!r}; choose from {sorted(_FACTORIES)}"
        ) from None
