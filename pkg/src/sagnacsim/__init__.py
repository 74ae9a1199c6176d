"""Desk-scale simulator for two closed-loop Sagnac photonics experiments:
witness-based characterization of 2-photon 4-qubit phased Dicke states, and
a single-photon path-encoded C-Phase gate in a displaced Sagnac loop."""

from .hilbert import (
    CPHASE_REGISTER,
    DICKE_REGISTER,
    DensityMatrix,
    Dof,
    PauliString,
    Photon,
    QubitAddress,
    RegisterError,
    StateVector,
    apply,
    basis_state,
    expectation,
    fidelity,
    measurement_distribution,
    partial_trace,
    tensor,
)
from .elements import ElementKind, OpticalElement, element_unitary, project_out
from .states import (
    PhaseParams,
    add_white_noise,
    dicke_states,
    generate_phased_dicke_via_circuit,
    he_state,
    xi_state,
)
from .witness import (
    StructureFactorSpec,
    WitnessReport,
    correlation_table,
    structural_witness_dicke,
    structure_factor,
    wmult,
)
from .cphase import (
    FringePoint,
    SagnacConfig,
    cphase_unitary,
    fringe_scan,
    measure_target_pauli,
    project_control,
    sagnac_evolve,
    truth_table,
)
from .counts import CountRecord, expectation_from_counts, sample
from .tomo import (
    ReconstructionResult,
    TomographyInput,
    fidelity_report,
    linear_reconstruct,
    ml_reconstruct,
    simulate_tomography,
)

__version__ = "0.1.0"
