"""Single-photon C-Phase gate on two path-encoded qubits in a displaced
Sagnac loop.

The control qubit is the photon's path before the second splitter (r=0,
l=1); the target is the circulation sense inside the loop (clockwise=0,
counterclockwise=1). Two thin glass plates, one per control branch, put
independent phases on the counterclockwise mode, which is exactly the
diagonal gate diag(1, e^{i phi_r}, 1, e^{i phi_l}).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import counts as counts_mod
from . import elements
from .hilbert import (
    CPHASE_REGISTER,
    DensityMatrix,
    Dof,
    RegisterError,
    StateVector,
    basis_state,
    measurement_distribution,
)

_TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SagnacConfig:
    """Plate phases and input mode for one run of the loop.

    ``locked`` asserts the experimental constraint phi_r = phi_l + pi; the
    phases themselves stay free parameters when it is off.
    """

    phi_r: float = 0.0
    phi_l: float = 0.0
    locked: bool = False
    input_mode: str = "r"

    def __post_init__(self):
        if self.input_mode not in ("r", "l"):
            raise ValueError(f"input_mode must be 'r' or 'l', got {self.input_mode!r}")
        if self.locked:
            offset = (self.phi_r - self.phi_l - math.pi) % _TWO_PI
            if min(offset, _TWO_PI - offset) > 1e-12:
                raise ValueError(
                    "locked configuration requires phi_r = phi_l + pi (mod 2 pi)"
                )

    @classmethod
    def locked_pair(cls, phi_l: float, input_mode: str = "r") -> "SagnacConfig":
        return cls(phi_r=phi_l + math.pi, phi_l=phi_l, locked=True, input_mode=input_mode)


@dataclass(frozen=True)
class FringePoint:
    phi: float
    probability: float
    counts: int
    sigma: float


def cphase_unitary(phi_r: float, phi_l: float) -> np.ndarray:
    """diag(1, e^{i phi_r}, 1, e^{i phi_l}) on (control, target)."""
    return np.diag([1.0, np.exp(1j * phi_r), 1.0, np.exp(1j * phi_l)]).astype(complex)


def _loop_elements(cfg: SagnacConfig):
    control, target = CPHASE_REGISTER
    glass = elements.ElementKind.GLASS_PLATE
    return [
        elements.OpticalElement(elements.ElementKind.BS, on=control),
        elements.OpticalElement(elements.ElementKind.BS, on=target),
        elements.OpticalElement(glass, on=target, phase=cfg.phi_r, when=(control, 0)),
        elements.OpticalElement(glass, on=target, phase=cfg.phi_l, when=(control, 1)),
    ]


def sagnac_evolve(cfg: SagnacConfig) -> StateVector:
    """Run the input mode through splitter, loop and plates.

    For input r the result is (|00> + e^{i phi_r}|01> + |10> + e^{i phi_l}|11>)/2:
    the first splitter balances the control, entering the loop balances the
    target per branch, and the plates imprint the branch phases.
    """
    bits = "00" if cfg.input_mode == "r" else "10"
    state = basis_state(CPHASE_REGISTER, bits)
    for element in _loop_elements(cfg):
        state = elements.apply_element(element, state)
    return state


def project_control(state: StateVector, which: int):
    """Condition on the control reading ``which``; returns the normalized
    target state and the projection probability."""
    if which not in (0, 1):
        raise ValueError(f"control projection must be 0 or 1, got {which}")
    control, target = state.register
    half = state.amplitudes.reshape(2, -1)[which]
    probability = float(np.linalg.norm(half) ** 2)
    if probability <= 0.0:
        raise ValueError(f"control has no amplitude on |{which}>")
    return StateVector((target,), half / math.sqrt(probability)), probability


def measure_target_pauli(state, axis: str) -> dict:
    """Outcome probabilities {+1: p, -1: q} for the loop qubit's Pauli.

    For a pure state, X and Y are realized the way the bench does it: an
    analysis phase (Y only) followed by the closing pass through the loop
    splitter, then reading the output port. Z is direct mode interception.
    Density matrices go through the basis-rotation route instead. Two-qubit
    inputs are marginalized over the control.
    """
    if axis not in "XYZ":
        raise ValueError(f"axis must be X, Y or Z, got {axis!r}")
    positions = [i for i, addr in enumerate(state.register) if addr.dof is Dof.SAGNAC]
    if not positions:
        raise RegisterError("state has no Sagnac-loop qubit")
    pos = positions[0]
    target = state.register[pos]

    if isinstance(state, StateVector):
        work = state
        if axis == "Y":
            analysis = elements.OpticalElement(
                elements.ElementKind.GLASS_PLATE, on=target, phase=-math.pi / 2
            )
            work = elements.apply_element(analysis, work)
        if axis in "XY":
            closing = elements.OpticalElement(elements.ElementKind.BS, on=target)
            work = elements.apply_element(closing, work)
        probs = np.abs(work.amplitudes) ** 2
        probs = probs.reshape([2] * work.num_qubits)
        other_axes = tuple(i for i in range(work.num_qubits) if i != pos)
        if other_axes:
            probs = probs.sum(axis=other_axes)
        plus, minus = float(probs[0]), float(probs[1])
    else:
        axes = "".join(axis if i == pos else "I" for i in range(state.num_qubits))
        dist = measurement_distribution(state, axes)
        plus, minus = dist["0"], dist["1"]
    return {+1: plus, -1: minus}


@dataclass(frozen=True)
class TruthTableRow:
    control: int
    plate_phase: float
    target: StateVector
    probability: float


def conditional_target(phi: float) -> StateVector:
    """Ideal conditional target state (|0> + e^{i phi}|1>)/sqrt(2)."""
    _, target = CPHASE_REGISTER
    return StateVector((target,), np.array([1.0, np.exp(1j * phi)]) / math.sqrt(2))


def truth_table(phi_r: float, phi_l: float):
    """Both rows of the gate's truth table, from the evolved state itself."""
    cfg = SagnacConfig(phi_r=phi_r, phi_l=phi_l)
    state = sagnac_evolve(cfg)
    rows = []
    for which, phase in ((0, phi_r), (1, phi_l)):
        target, probability = project_control(state, which)
        rows.append(TruthTableRow(which, phase, target, probability))
    return rows


def fringe_scan(project: int, phis, shots: int, seed: int, noise_p: float = 0.0,
                sagnac_dephasing: float = 0.0):
    """Bright-port fringe versus the scanned plate phase.

    Projecting the control on |0> scans phi_r, on |1> scans phi_l (the other
    plate rides pi away, as in the locked configuration). Each point draws
    its counts from an independently derived seed, so the scan decomposes
    over points. White noise on the target and dephasing of the loop qubit
    both shrink the visibility.
    """
    if shots <= 0:
        raise ValueError(f"shots must be positive, got {shots}")
    points = []
    for index, phi in enumerate(phis):
        if project == 0:
            cfg = SagnacConfig(phi_r=phi, phi_l=phi + math.pi)
        else:
            cfg = SagnacConfig(phi_r=phi + math.pi, phi_l=phi)
        target, _ = project_control(sagnac_evolve(cfg), project)
        if sagnac_dephasing > 0.0 or noise_p > 0.0:
            rho = target.to_density_matrix()
            if sagnac_dephasing > 0.0:
                mixed = (1 - sagnac_dephasing) * rho.matrix + sagnac_dephasing * (
                    np.diag([1.0, -1.0]) @ rho.matrix @ np.diag([1.0, -1.0])
                )
                rho = DensityMatrix(rho.register, mixed)
            if noise_p > 0.0:
                mixed = noise_p * np.eye(2) / 2 + (1 - noise_p) * rho.matrix
                rho = DensityMatrix(rho.register, mixed)
            outcome = measure_target_pauli(rho, "X")
        else:
            outcome = measure_target_pauli(target, "X")
        probability = outcome[+1]
        record = counts_mod.sample(
            {"bright": probability, "dark": 1.0 - probability},
            shots,
            counts_mod.derived_seed(seed, index),
            setting=f"fringe phi={phi:.6g}",
        )
        bright = record.outcome_counts["bright"]
        points.append(FringePoint(float(phi), probability, bright, math.sqrt(bright)))
    return points


def fit_visibility(phis, values) -> float:
    """Least-squares fit of a + b cos(phi) + c sin(phi); returns the fringe
    visibility sqrt(b^2 + c^2) / a."""
    phis = np.asarray(phis, dtype=float)
    design = np.column_stack([np.ones_like(phis), np.cos(phis), np.sin(phis)])
    coef, *_ = np.linalg.lstsq(design, np.asarray(values, dtype=float), rcond=None)
    offset, b, c = coef
    return float(math.hypot(b, c) / offset)
