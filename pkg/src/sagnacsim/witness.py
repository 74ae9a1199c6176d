"""Structure-factor operators and the two entanglement witnesses used to
characterize the phased Dicke state: the structural witness built from
phased two-body correlation sums, and the collective-spin multipartite
witness evaluated in both its operator form and its expanded two-plus-four
body form.

All pair sums run over i < j with site positions r_i = i by default; the
structure factor carries an explicit ``normalized`` flag (division by the
number of pairs) and is never normalized silently, because the two witness
definitions use different conventions.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import counts as counts_mod
from .hilbert import (
    DensityMatrix,
    PauliString,
    StateVector,
    expectation,
    measurement_distribution,
)
from .states import add_white_noise

N_QUBITS = 4
N_PAIRS = math.comb(N_QUBITS, 2)

# Row order of the reference pair-correlation table.
PAIR_ORDER = ((1, 4), (2, 4), (3, 4), (1, 2), (1, 3), (2, 3))

# Pair correlations measured in the original benchtop realization of the
# phased Dicke state (coincidence counts, Poissonian error bars). Used as a
# regression dataset for the table-driven witness path.
BENCHMARK_PAIR_CORRELATIONS = {
    ("x", (1, 4)): (-0.458, 0.013),
    ("x", (2, 4)): (0.531, 0.012),
    ("x", (3, 4)): (-0.384, 0.013),
    ("x", (1, 2)): (-0.545, 0.012),
    ("x", (1, 3)): (0.597, 0.011),
    ("x", (2, 3)): (-0.620, 0.011),
    ("y", (1, 4)): (-0.617, 0.009),
    ("y", (2, 4)): (0.590, 0.009),
    ("y", (3, 4)): (-0.528, 0.009),
    ("y", (1, 2)): (-0.550, 0.009),
    ("y", (1, 3)): (0.523, 0.010),
    ("y", (2, 3)): (-0.425, 0.010),
    ("z", (1, 4)): (-0.327, 0.024),
    ("z", (2, 4)): (-0.304, 0.024),
    ("z", (3, 4)): (-0.314, 0.024),
    ("z", (1, 2)): (-0.354, 0.024),
    ("z", (1, 3)): (-0.308, 0.024),
    ("z", (2, 3)): (-0.315, 0.024),
}

# Four-body collective expectations from the same run.
BENCHMARK_FOUR_BODY = {
    "XXXX": (0.673, 0.011),
    "YYYY": (0.635, 0.009),
    "ZZZZ": (0.922, 0.010),
}


class ConventionError(ValueError):
    """A structure factor came out complex where the convention demands real."""


@dataclass(frozen=True)
class StructureFactorSpec:
    """Phased two-body sum sum_{i<j} e^{ik(r_i - r_j)} S_i^alpha S_j^beta."""

    alpha: str
    beta: str
    k: float
    positions: tuple = tuple(range(1, N_QUBITS + 1))
    normalized: bool = False

    def __post_init__(self):
        if self.alpha not in "xyz" or self.beta not in "xyz":
            raise ValueError(f"axes must be x, y or z, got {self.alpha}{self.beta}")
        if len(self.positions) != N_QUBITS:
            raise ValueError("positions must list one site per qubit")

    def pair_phase(self, pair) -> complex:
        i, j = pair
        return complex(np.exp(1j * self.k * (self.positions[i - 1] - self.positions[j - 1])))


def _two_site_string(alpha: str, beta: str, pair) -> PauliString:
    labels = []
    for q in range(1, N_QUBITS + 1):
        if q == pair[0]:
            labels.append(alpha.upper())
        elif q == pair[1]:
            labels.append(beta.upper())
        else:
            labels.append("I")
    return PauliString("".join(labels))


def _pair_string(axis: str, pair) -> PauliString:
    return _two_site_string(axis, axis, pair)


def structure_factor_operator(spec: StructureFactorSpec) -> np.ndarray:
    """Dense matrix of the phased pair sum."""
    dim = 2**N_QUBITS
    out = np.zeros((dim, dim), dtype=complex)
    for pair in PAIR_ORDER:
        out += spec.pair_phase(pair) * _two_site_string(spec.alpha, spec.beta, pair).to_matrix()
    if spec.normalized:
        out /= N_PAIRS
    return out


def structure_factor(spec: StructureFactorSpec, state) -> float:
    """Expectation of the phased pair sum; rejects complex residues."""
    total = 0j
    for pair in PAIR_ORDER:
        corr = expectation(_two_site_string(spec.alpha, spec.beta, pair), state)
        total += spec.pair_phase(pair) * corr
    if spec.normalized:
        total /= N_PAIRS
    if abs(total.imag) > 1e-10:
        raise ConventionError(
            f"structure factor S^{spec.alpha}{spec.beta}({spec.k}) has imaginary "
            f"part {total.imag}; check the phase convention"
        )
    return float(total.real)


@dataclass(frozen=True)
class CorrelationRow:
    """One measured pair correlation in the reference table layout."""

    operator: str  # e.g. "Sxx_14"
    qubits: str  # e.g. "X11X"
    settings: str  # e.g. "(X1)k(1X)pi"
    value: float
    sigma: float = 0.0

    @property
    def axis(self) -> str:
        return self.operator[1]

    @property
    def pair(self):
        return (int(self.operator[-2]), int(self.operator[-1]))


def _row_labels(axis: str, pair):
    letter = axis.upper()
    qubits = "".join(letter if q in pair else "1" for q in range(1, N_QUBITS + 1))
    momentum = qubits[0] + qubits[2]  # qubits 1 and 3 live in the path DOF
    polarization = qubits[1] + qubits[3]
    settings = f"({momentum})k({polarization})π"  # k = path, pi = polarization
    operator = f"S{axis}{axis}_{pair[0]}{pair[1]}"
    return operator, qubits, settings


def correlation_table(state, noise_p: float = 0.0, shots=None, seed: int = 42):
    """All 18 pair correlations (xx, yy, zz over the six pairs) as rows.

    Exact expectations by default; with ``shots`` set, each row is estimated
    from a multinomial draw with Poissonian error bars, one derived seed per
    row so the table is reproducible row-by-row.
    """
    if noise_p:
        work_state = add_white_noise(state, noise_p) if isinstance(state, StateVector) else state
    else:
        work_state = state
    rows = []
    parity = {"00": 1.0, "01": -1.0, "10": -1.0, "11": 1.0}
    for axis_index, axis in enumerate("xyz"):
        for pair_index, pair in enumerate(PAIR_ORDER):
            operator, qubits, settings = _row_labels(axis, pair)
            if shots is None:
                value = expectation(_pair_string(axis, pair), work_state)
                sigma = 0.0
            else:
                axes = "".join(
                    axis.upper() if q in pair else "I" for q in range(1, N_QUBITS + 1)
                )
                dist = measurement_distribution(work_state, axes)
                record = counts_mod.sample(
                    dist,
                    shots,
                    counts_mod.derived_seed(seed, axis_index * N_PAIRS + pair_index),
                    setting=settings,
                )
                value, sigma = counts_mod.expectation_from_counts(record, parity)
            rows.append(CorrelationRow(operator, qubits, settings, value, sigma))
    return rows


@dataclass(frozen=True)
class WitnessTerm:
    label: str
    phase: float
    correlation: float
    contribution: float
    sigma: float = 0.0


@dataclass(frozen=True)
class WitnessReport:
    """Witness value with propagated uncertainty and its per-term breakdown.

    A negative value certifies entanglement (the witness is non-negative on
    the states it is built to exclude).
    """

    value: float
    uncertainty: float
    form: str
    terms: tuple = field(default_factory=tuple)

    @property
    def detects_entanglement(self) -> bool:
        return self.value < 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "value": float(self.value),
                "sigma": float(self.uncertainty),
                "form": self.form,
                "entangled": bool(self.detects_entanglement),
                "terms": [
                    {
                        "label": t.label,
                        "phase": float(t.phase),
                        "correlation": float(t.correlation),
                        "contribution": float(t.contribution),
                        "sigma": float(t.sigma),
                    }
                    for t in self.terms
                ],
            }
        )


def _rows_by_key(rows):
    table = {}
    for row in rows:
        table[(row.axis, row.pair)] = (row.value, row.sigma)
    missing = {
        (axis, pair)
        for axis in "xyz"
        for pair in PAIR_ORDER
        if (axis, pair) not in table
    }
    if missing:
        raise ValueError(f"correlation table is missing entries: {sorted(missing)}")
    return table


def rows_from_benchmark():
    """The benchtop reference dataset in CorrelationRow form."""
    rows = []
    for axis in "xyz":
        for pair in PAIR_ORDER:
            operator, qubits, settings = _row_labels(axis, pair)
            value, sigma = BENCHMARK_PAIR_CORRELATIONS[(axis, pair)]
            rows.append(CorrelationRow(operator, qubits, settings, value, sigma))
    return rows


def structural_witness_dicke(source) -> WitnessReport:
    """The structural witness 1 - (1/6)[Sxx(pi) + Syy(pi) - Szz(0)].

    ``source`` is either a 4-qubit state (exact evaluation) or an 18-row
    correlation table (assembled value with quadrature-propagated sigma).
    Reads -2/3 on the ideal phased Dicke state and +1 on white noise.
    """
    if isinstance(source, (StateVector, DensityMatrix)):
        source = correlation_table(source)
    table = _rows_by_key(source)
    axis_k = {"x": math.pi, "y": math.pi, "z": 0.0}
    axis_weight = {"x": -1.0 / N_PAIRS, "y": -1.0 / N_PAIRS, "z": 1.0 / N_PAIRS}
    terms = []
    value = 1.0
    variance = 0.0
    for axis in "xyz":
        spec = StructureFactorSpec(axis, axis, axis_k[axis])
        for pair in PAIR_ORDER:
            corr, sigma = table[(axis, pair)]
            phase = spec.pair_phase(pair)
            if abs(phase.imag) > 1e-10:
                raise ConventionError("structural witness phases must be real")
            contribution = axis_weight[axis] * phase.real * corr
            value += contribution
            variance += (axis_weight[axis] * phase.real * sigma) ** 2
            terms.append(
                WitnessTerm(
                    label=f"S{axis}{axis}_{pair[0]}{pair[1]}",
                    phase=phase.real,
                    correlation=corr,
                    contribution=contribution,
                    sigma=sigma,
                )
            )
    return WitnessReport(value, math.sqrt(variance), "structural", tuple(terms))


def _collective_operator():
    eye = np.eye(2**N_QUBITS, dtype=complex)
    s_ops = {
        axis: structure_factor_operator(
            StructureFactorSpec(axis, axis, math.pi if axis in "xy" else 0.0)
        )
        for axis in "xyz"
    }
    j2 = {axis: eye + s / 2 for axis, s in s_ops.items()}
    j4 = {axis: eye + s + (s @ s) / 4 for axis, s in s_ops.items()}
    w = (
        2 * eye
        + (j2["x"] + j2["y"] - j4["x"] - j4["y"]) / 6
        + (31 / 12) * j2["z"]
        - (7 / 12) * j4["z"]
    )
    return w, j2, j4


def wmult(state=None, pair_rows=None, four_body=None, form: str = "collective",
          normalized: bool = False) -> WitnessReport:
    """Multipartite collective-spin witness, in either form.

    ``collective`` builds the squared and fourth-power collective-spin
    operators from the structure factors and takes one expectation (state
    required). ``expanded`` evaluates the literal two-body plus four-body
    combination (1/8)(2 - 2Sxx - 2Syy + Szz - 7<ZZZZ> - 2<XXXX> - 2<YYYY>),
    from a state or from (pair_rows, four_body) tables; ``normalized``
    divides the pair sums by the number of pairs.

    The two forms do NOT agree (collective reads -1 on the ideal state,
    expanded reads -3.375 with unnormalized sums); both are reported so the
    discrepancy stays visible. See the README for the full caveat.
    """
    if form == "collective":
        if state is None:
            raise ValueError("the collective form needs a state; tables only carry "
                             "two-body and four-body data, not squared pair sums")
        w_op, j2, j4 = _collective_operator()
        terms = []
        for axis in "xyz":
            terms.append(WitnessTerm(f"J2{axis}", 1.0, expectation(j2[axis], state),
                                     0.0))
            terms.append(WitnessTerm(f"J4{axis}", 1.0, expectation(j4[axis], state),
                                     0.0))
        return WitnessReport(expectation(w_op, state), 0.0, "collective", tuple(terms))

    if form != "expanded":
        raise ValueError(f"form must be 'collective' or 'expanded', got {form!r}")

    scale = N_PAIRS if normalized else 1
    if state is not None:
        s_vals = {
            axis: structure_factor(
                StructureFactorSpec(axis, axis, math.pi if axis in "xy" else 0.0,
                                    normalized=normalized),
                state,
            )
            for axis in "xyz"
        }
        s_sigmas = {axis: 0.0 for axis in "xyz"}
        four = {label: (expectation(PauliString(label), state), 0.0)
                for label in ("XXXX", "YYYY", "ZZZZ")}
    else:
        if pair_rows is None or four_body is None:
            raise ValueError("the expanded form needs pair_rows and four_body tables")
        table = _rows_by_key(pair_rows)
        s_vals, s_sigmas = {}, {}
        for axis in "xyz":
            spec = StructureFactorSpec(axis, axis, math.pi if axis in "xy" else 0.0)
            total, var = 0.0, 0.0
            for pair in PAIR_ORDER:
                corr, sigma = table[(axis, pair)]
                phase = spec.pair_phase(pair).real
                total += phase * corr
                var += (phase * sigma) ** 2
            s_vals[axis] = total / scale
            s_sigmas[axis] = math.sqrt(var) / scale
        four = {label: tuple(four_body[label]) for label in ("XXXX", "YYYY", "ZZZZ")}

    weights = {"sxx": -2 / 8, "syy": -2 / 8, "szz": 1 / 8,
               "XXXX": -2 / 8, "YYYY": -2 / 8, "ZZZZ": -7 / 8}
    value = 2 / 8 * 1.0
    variance = 0.0
    terms = []
    for axis, key in (("x", "sxx"), ("y", "syy"), ("z", "szz")):
        contribution = weights[key] * s_vals[axis]
        value += contribution
        variance += (weights[key] * s_sigmas[axis]) ** 2
        terms.append(WitnessTerm(key.capitalize(), 1.0, s_vals[axis], contribution,
                                 s_sigmas[axis]))
    for label in ("XXXX", "YYYY", "ZZZZ"):
        corr, sigma = four[label]
        contribution = weights[label] * corr
        value += contribution
        variance += (weights[label] * sigma) ** 2
        terms.append(WitnessTerm(label, 1.0, corr, contribution, sigma))
    form_label = "expanded-normalized" if normalized else "expanded"
    return WitnessReport(value, math.sqrt(variance), form_label, tuple(terms))


def table_to_csv(rows) -> str:
    lines = ["operator,qubits,settings,value,sigma"]
    for row in rows:
        lines.append(
            f"{row.operator},{row.qubits},{row.settings},"
            f"{row.value:.6g},{row.sigma:.6g}"
        )
    return "\n".join(lines) + "\n"
