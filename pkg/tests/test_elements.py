import math

import numpy as np
import pytest

from sagnacsim.elements import (
    CX,
    CZBAR,
    ElementKind,
    OpticalElement,
    PBS_MATRIX,
    PostSelectionEmptyError,
    apply_element,
    element_unitary,
    glass_plate_matrix,
    hwp_matrix,
    project_out,
    qwp_matrix,
)
from sagnacsim.hilbert import (
    CPHASE_REGISTER,
    DICKE_REGISTER,
    StateVector,
    basis_state,
    fidelity,
)

Q1, Q2, Q3, Q4 = DICKE_REGISTER
CTRL, LOOP = CPHASE_REGISTER

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def test_bs_is_hadamard_on_path():
    gate, targets = element_unitary(OpticalElement(ElementKind.BS, on=CTRL))
    assert targets == (CTRL,)
    assert np.allclose(gate, H, atol=1e-12)
    out = apply_element(OpticalElement(ElementKind.BS, on=CTRL), basis_state((CTRL,), "0"))
    assert np.allclose(out.amplitudes, [1, 1] / np.sqrt(2))


def test_bs_rejects_polarization_qubit():
    with pytest.raises(ValueError):
        element_unitary(OpticalElement(ElementKind.BS, on=Q2))


def test_hwp_fixed_points():
    assert np.allclose(hwp_matrix(0.0), Z, atol=1e-12)
    assert np.allclose(hwp_matrix(math.radians(45)), X, atol=1e-12)
    assert np.allclose(hwp_matrix(math.radians(22.5)), H, atol=1e-12)


def test_hwp_zero_flips_vertical_sign():
    out = apply_element(
        OpticalElement(ElementKind.HWP, on=Q2, angle=0.0), basis_state((Q2,), "1")
    )
    assert np.allclose(out.amplitudes, [0, -1])


def test_conditioned_hwp45_is_cx():
    element = OpticalElement(
        ElementKind.HWP, on=Q2, angle=math.radians(45), when=(Q1, 1)
    )
    gate, targets = element_unitary(element)
    assert targets == (Q1, Q2)
    expected = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    # entry-for-entry against the direct controlled-gate definition
    assert np.allclose(gate, CX, atol=1e-12)
    assert np.allclose(gate, expected, atol=1e-12)


def test_conditioned_hwp0_is_czbar():
    element = OpticalElement(ElementKind.HWP, on=Q2, angle=0.0, when=(Q1, 0))
    gate, _ = element_unitary(element)
    expected = np.diag([1.0, -1.0, 1.0, 1.0]).astype(complex)
    assert np.allclose(gate, CZBAR, atol=1e-12)
    assert np.allclose(gate, expected, atol=1e-12)


def test_conditioning_on_polarization_rejected():
    element = OpticalElement(ElementKind.HWP, on=Q4, angle=0.0, when=(Q2, 1))
    with pytest.raises(ValueError):
        element_unitary(element)


def test_beam_stop_rejected_as_unitary():
    with pytest.raises(ValueError):
        element_unitary(OpticalElement(ElementKind.BEAM_STOP, on=Q1))


def test_unitarity_on_angle_grid():
    angles = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    for theta in angles:
        for build in (hwp_matrix, qwp_matrix, glass_plate_matrix):
            gate = build(theta)
            assert np.allclose(gate.conj().T @ gate, np.eye(2), atol=1e-12)
    for theta in angles[:8]:
        element = OpticalElement(ElementKind.HWP, on=Q2, angle=theta, when=(Q1, 1))
        gate, _ = element_unitary(element)
        assert np.allclose(gate.conj().T @ gate, np.eye(4), atol=1e-12)


def test_hwp_ninety_degree_period_up_to_global_phase():
    rng = np.random.default_rng(12)
    for theta in rng.uniform(0, math.pi, size=6):
        amps = rng.normal(size=2) + 1j * rng.normal(size=2)
        state = StateVector((Q2,), amps / np.linalg.norm(amps))
        a = apply_element(OpticalElement(ElementKind.HWP, on=Q2, angle=theta), state)
        b = apply_element(
            OpticalElement(ElementKind.HWP, on=Q2, angle=theta + math.pi / 2), state
        )
        assert fidelity(a.to_density_matrix(), b) == pytest.approx(1.0, abs=1e-12)


def test_glass_plate_phase():
    plus = StateVector((CTRL,), np.array([1, 1]) / np.sqrt(2))
    out = apply_element(
        OpticalElement(ElementKind.GLASS_PLATE, on=CTRL, phase=math.pi), plus
    )
    assert np.allclose(out.amplitudes, [1, -1] / np.sqrt(2), atol=1e-12)


def test_pbs_transmits_h_reflects_v():
    element = OpticalElement(ElementKind.PBS, on=Q1, when=(Q2, 1))
    gate, targets = element_unitary(element)
    assert targets == (Q2, Q1)
    assert np.allclose(gate, PBS_MATRIX)
    # H polarization (pol=0): path unchanged; V (pol=1): path flipped
    state = basis_state((Q1, Q2), "00")  # path r, pol H
    assert np.allclose(apply_element(element, state).amplitudes, state.amplitudes)
    state_v = basis_state((Q1, Q2), "01")  # path r, pol V
    out = apply_element(element, state_v)
    assert np.allclose(out.amplitudes, basis_state((Q1, Q2), "11").amplitudes)


def test_pbs_requires_polarization_partner():
    with pytest.raises(ValueError):
        element_unitary(OpticalElement(ElementKind.PBS, on=Q1))
    with pytest.raises(ValueError):
        element_unitary(OpticalElement(ElementKind.PBS, on=Q1, when=(Q3, 1)))


# ----------------------------------------------------------------- beam stops


def test_project_out_plus_state():
    plus = StateVector((Q1,), np.array([1, 1]) / np.sqrt(2))
    survived, prob = project_out(Q1, 1, plus)
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(survived.amplitudes, [1, 0])


def test_project_out_momentum_term_of_source_state():
    # the lr momentum term sits only on q1 = l, so a stop there collapses
    # the momentum pair to |rl> with probability 1/2, independent of delta
    from sagnacsim.states import PhaseParams, he_state

    for delta in (0.0, 1.0, math.pi):
        state = he_state(PhaseParams(delta=delta))
        survived, prob = project_out(Q1, 1, state)
        assert prob == pytest.approx(0.5, abs=1e-12)
        nonzero = np.flatnonzero(np.abs(survived.amplitudes) > 1e-12)
        assert set(nonzero) == {0b0010, 0b0111}


def test_project_out_unpopulated_mode_is_noop():
    state = basis_state((Q1,), "0")
    survived, prob = project_out(Q1, 1, state)
    assert prob == pytest.approx(1.0)
    assert np.allclose(survived.amplitudes, state.amplitudes)


def test_project_out_idempotent():
    rng = np.random.default_rng(7)
    amps = rng.normal(size=4) + 1j * rng.normal(size=4)
    state = StateVector((Q1, Q2), amps / np.linalg.norm(amps))
    once, _ = project_out(Q2, 0, state)
    twice, prob = project_out(Q2, 0, once)
    assert prob == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(twice.amplitudes, once.amplitudes, atol=1e-12)


def test_project_out_total_extinction():
    state = basis_state((Q1,), "1")
    with pytest.raises(PostSelectionEmptyError):
        project_out(Q1, 1, state)


# ------------------------------------------------------------ JSON wire format


def test_element_from_json_reference_example():
    from sagnacsim.elements import element_from_json

    obj = {"kind": "HWP", "angle_deg": 45, "on": "A.pol",
           "when": {"qubit": "A.path", "is": 1}}
    element = element_from_json(obj, DICKE_REGISTER)
    assert element.kind is ElementKind.HWP
    assert element.on == Q2
    assert element.when == (Q1, 1)
    gate, targets = element_unitary(element)
    from sagnacsim.elements import CX

    assert targets == (Q1, Q2)
    assert np.allclose(gate, CX, atol=1e-12)


def test_element_json_round_trip():
    from sagnacsim.elements import element_from_json, element_to_json

    originals = [
        OpticalElement(ElementKind.BS, on=Q1),
        OpticalElement(ElementKind.HWP, on=Q4, angle=math.radians(22.5)),
        OpticalElement(ElementKind.GLASS_PLATE, on=Q3, phase=1.25, when=(Q1, 0)),
        OpticalElement(ElementKind.BEAM_STOP, on=Q1, blocks=1, when=(Q2, 1)),
        OpticalElement(ElementKind.PBS, on=Q1, when=(Q2, 1)),
    ]
    for original in originals:
        back = element_from_json(element_to_json(original), DICKE_REGISTER)
        assert back == original


def test_element_json_bad_address():
    from sagnacsim.elements import element_from_json

    with pytest.raises(ValueError):
        element_from_json({"kind": "BS", "on": "C.path"}, DICKE_REGISTER)
    with pytest.raises(ValueError):
        element_from_json({"kind": "BS", "on": "A-path"}, DICKE_REGISTER)


def test_run_sequence_with_beam_stop():
    from sagnacsim.elements import run_sequence

    plus = StateVector((Q1,), np.array([1, 1]) / np.sqrt(2))
    sequence = [OpticalElement(ElementKind.BEAM_STOP, on=Q1, blocks=1)]
    state, probability = run_sequence(plus, sequence)
    assert probability == pytest.approx(0.5)
    assert np.allclose(state.amplitudes, [1, 0])
