"""Optical elements as gates on labeled qubits.

A beam splitter is the Hadamard on the path qubit it sits on; wave plates act
on polarization with the fixed convention HWP(theta) = cos(2 theta) Z +
sin(2 theta) X (so HWP(0)=Z, HWP(45deg)=X, HWP(22.5deg)=H, with no stray
global phase); a thin glass plate is diag(1, e^{i phi}) on its path qubit.
An element placed in only one path mode becomes a controlled gate with the
path qubit as control. Beam stops are the single non-unitary element and are
handled separately by project_out.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .hilbert import (
    Dof,
    QubitAddress,
    RegisterError,
    StateVector,
    HADAMARD,
    apply,
)


class PostSelectionEmptyError(ValueError):
    """A beam stop removed all amplitude; nothing survives post-selection."""


class ElementKind(str, Enum):
    BS = "BS"
    PBS = "PBS"
    HWP = "HWP"
    QWP = "QWP"
    GLASS_PLATE = "GlassPlate"
    BEAM_STOP = "BeamStop"


@dataclass(frozen=True)
class OpticalElement:
    """An element, where it acts, and (optionally) which path mode it sits in.

    ``angle`` is the wave-plate axis angle, ``phase`` the glass-plate
    retardation, both in radians. ``when`` = (path address, basis value)
    restricts the element to one mode, turning it into a controlled gate.
    For a PBS, ``when`` names the polarization qubit that selects
    transmission (H) versus reflection (V) of the ``on`` path qubit.
    """

    kind: ElementKind
    on: QubitAddress
    angle: float = 0.0
    phase: float = 0.0
    when: tuple | None = None
    blocks: int = 1  # BeamStop only: which basis value the stop removes


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def hwp_matrix(theta: float) -> np.ndarray:
    """Half-wave plate with axis at ``theta``: cos(2t) Z + sin(2t) X."""
    rot = _rotation(theta)
    return rot @ np.diag([1.0, -1.0]).astype(complex) @ rot.T


def qwp_matrix(theta: float) -> np.ndarray:
    """Quarter-wave plate with axis at ``theta`` (retardation -i on slow axis)."""
    rot = _rotation(theta)
    return rot @ np.diag([1.0, -1.0j]) @ rot.T


def glass_plate_matrix(phi: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi)])


def controlled(gate: np.ndarray, control_value: int) -> np.ndarray:
    """4x4 unitary applying ``gate`` to the target when the control reads
    ``control_value``, identity otherwise. Control is the first (most
    significant) slot of the pair."""
    out = np.eye(4, dtype=complex)
    row = 2 * control_value
    out[row : row + 2, row : row + 2] = gate
    return out


# Direct two-qubit definitions, for cross-checking the conditioned-plate route.
CX = controlled(np.array([[0, 1], [1, 0]], dtype=complex), control_value=1)
CZBAR = controlled(np.diag([1.0, -1.0]).astype(complex), control_value=0)

# Basis |pol, path>: H (pol=0) keeps the path, V (pol=1) swaps it.
PBS_MATRIX = controlled(np.array([[0, 1], [1, 0]], dtype=complex), control_value=1)


def element_unitary(element: OpticalElement):
    """Map an element to (unitary matrix, target addresses).

    Single-qubit elements return a 2x2 on (on,); conditioned placements
    return a 4x4 on (control, on). Beam stops are non-unitary and rejected.
    """
    kind = element.kind
    if kind is ElementKind.BEAM_STOP:
        raise ValueError("beam stops are non-unitary; use project_out")

    if kind is ElementKind.BS:
        if element.on.dof not in (Dof.PATH, Dof.SAGNAC):
            raise ValueError("a beam splitter acts on a path-encoded qubit")
        gate = HADAMARD
    elif kind is ElementKind.HWP:
        gate = hwp_matrix(element.angle)
    elif kind is ElementKind.QWP:
        gate = qwp_matrix(element.angle)
    elif kind is ElementKind.GLASS_PLATE:
        gate = glass_plate_matrix(element.phase)
    elif kind is ElementKind.PBS:
        if element.when is None:
            raise ValueError("a PBS couples a path qubit to a polarization qubit; set `when`")
        pol, _ = element.when
        if pol.dof is not Dof.POLARIZATION or element.on.dof is not Dof.PATH:
            raise ValueError("PBS expects on=path qubit, when=(polarization qubit, _)")
        return PBS_MATRIX, (pol, element.on)
    else:
        raise ValueError(f"unknown element kind {kind}")

    if element.when is None:
        return gate, (element.on,)
    control, value = element.when
    if control.dof not in (Dof.PATH, Dof.SAGNAC):
        raise ValueError("an element can only be conditioned on a path mode")
    if value not in (0, 1):
        raise ValueError(f"conditioning basis value must be 0 or 1, got {value}")
    return controlled(gate, value), (control, element.on)


def apply_element(element: OpticalElement, state: StateVector) -> StateVector:
    gate, targets = element_unitary(element)
    return apply(gate, targets, state)


# JSON wire format for elements, e.g.
# {"kind": "HWP", "angle_deg": 45, "on": "A.pol", "when": {"qubit": "A.path", "is": 1}}
_DOF_NAMES = {
    "path": Dof.PATH,
    "pol": Dof.POLARIZATION,
    "polarization": Dof.POLARIZATION,
    "sagnac": Dof.SAGNAC,
}


def parse_address(text: str, register) -> QubitAddress:
    """Resolve an address string like "A.pol" against a register."""
    try:
        photon_str, dof_str = text.split(".")
        dof = _DOF_NAMES[dof_str]
    except (ValueError, KeyError):
        raise ValueError(f"malformed qubit address {text!r}") from None
    for addr in register:
        if addr.photon.value == photon_str and addr.dof is dof:
            return addr
    raise RegisterError(f"address {text!r} not found in register")


def element_from_json(obj: dict, register) -> OpticalElement:
    """Build an element from its JSON form (angles in degrees on the wire)."""
    kind = ElementKind(obj["kind"])
    on = parse_address(obj["on"], register)
    if "angle_deg" in obj:
        angle = math.radians(float(obj["angle_deg"]))
    else:
        angle = float(obj.get("angle", 0.0))
    if "phase_deg" in obj:
        phase = math.radians(float(obj["phase_deg"]))
    else:
        phase = float(obj.get("phase", 0.0))
    when = None
    if obj.get("when") is not None:
        when = (parse_address(obj["when"]["qubit"], register), int(obj["when"]["is"]))
    blocks = int(obj.get("blocks", 1))
    return OpticalElement(kind=kind, on=on, angle=angle, phase=phase, when=when,
                          blocks=blocks)


def element_to_json(element: OpticalElement) -> dict:
    obj = {"kind": element.kind.value, "on": str(element.on)}
    if element.kind in (ElementKind.HWP, ElementKind.QWP):
        obj["angle_deg"] = math.degrees(element.angle)
    if element.kind is ElementKind.GLASS_PLATE:
        obj["phase"] = element.phase
    if element.kind is ElementKind.BEAM_STOP:
        obj["blocks"] = element.blocks
    if element.when is not None:
        obj["when"] = {"qubit": str(element.when[0]), "is": element.when[1]}
    return obj


def run_sequence(state: StateVector, sequence):
    """Apply elements in order; beam stops post-select. Returns the final
    state and the compound survival probability."""
    probability = 1.0
    for element in sequence:
        if element.kind is ElementKind.BEAM_STOP:
            state, prob = project_out(element.on, element.blocks, state,
                                      when=element.when)
            probability *= prob
        else:
            state = apply_element(element, state)
    return state, probability


def project_out(address: QubitAddress, basis_value: int, state: StateVector, when=None):
    """Beam stop: zero every amplitude with ``address`` in ``basis_value``.

    ``when`` = (address, value) stops only the component where that other
    qubit also reads ``value`` (a stop placed in one spatially separated
    mode of a correlated emission). Returns (renormalized state, survival
    probability). Stopping an unpopulated mode is a no-op with probability 1.
    """
    n = state.num_qubits
    pos = state.position(address)
    idx = np.arange(2**n)
    stopped = ((idx >> (n - 1 - pos)) & 1) == basis_value
    if when is not None:
        other, other_value = when
        other_pos = state.position(other)
        stopped &= ((idx >> (n - 1 - other_pos)) & 1) == other_value
    surviving = np.where(stopped, 0.0, state.amplitudes)
    prob = float(np.linalg.norm(surviving) ** 2)
    if prob <= 0.0:
        raise PostSelectionEmptyError(
            f"beam stop on {address}={basis_value} removes all amplitude"
        )
    return StateVector(state.register, surviving / math.sqrt(prob)), prob
