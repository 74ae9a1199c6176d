"""Simulated detector counts with Poissonian error bars.

Sampling is multinomial at fixed shots, seeded through numpy's default
PCG64 generator so records are bit-for-bit reproducible across platforms.
Outcome labels are sorted before drawing, which makes the draw independent
of dict insertion order.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

PROB_TOL = 1e-9


class EmptyRecordError(ValueError):
    """Expectation requested from a record with zero total counts."""


@dataclass(frozen=True)
class CountRecord:
    """Per-outcome event counts for one measurement setting.

    The total may fall short of ``shots`` (losses are allowed) but never
    exceed it, and no count is negative.
    """

    setting: str
    outcome_counts: dict
    shots: int
    seed: int

    def __post_init__(self):
        if any(n < 0 for n in self.outcome_counts.values()):
            raise ValueError("negative count")
        if self.total > self.shots:
            raise ValueError(
                f"counts total {self.total} exceeds shots {self.shots}"
            )

    @property
    def total(self) -> int:
        return int(sum(self.outcome_counts.values()))

    def sigma(self, outcome) -> float:
        """Poissonian error bar sqrt(n) on one outcome's count."""
        return math.sqrt(self.outcome_counts.get(outcome, 0))

    def to_json(self) -> str:
        return json.dumps(
            {
                "setting": self.setting,
                "outcome_counts": dict(sorted(self.outcome_counts.items())),
                "shots": self.shots,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CountRecord":
        data = json.loads(text)
        return cls(
            setting=data["setting"],
            outcome_counts=dict(data["outcome_counts"]),
            shots=int(data["shots"]),
            seed=int(data["seed"]),
        )


def sample(probabilities: dict, shots: int, seed: int, setting: str = "") -> CountRecord:
    """Multinomial draw of ``shots`` events over the outcome distribution."""
    if shots <= 0:
        raise ValueError(f"shots must be positive, got {shots}")
    outcomes = sorted(probabilities)
    probs = np.array([probabilities[o] for o in outcomes], dtype=float)
    total = probs.sum()
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {total}, not 1")
    if (probs < -PROB_TOL).any():
        raise ValueError("negative probability")
    probs = np.clip(probs, 0.0, None)  # rounding dust from near-pure states
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs / total)
    return CountRecord(
        setting=setting,
        outcome_counts={o: int(n) for o, n in zip(outcomes, draws)},
        shots=int(shots),
        seed=int(seed),
    )


def expectation_from_counts(record: CountRecord, eigenvalues: dict):
    """Estimate <A> = sum(lambda_o n_o) / N with per-outcome binomial error
    bars summed in quadrature. Returns (value, sigma)."""
    total = record.total
    if total == 0:
        raise EmptyRecordError(f"record {record.setting!r} has no counts")
    value = 0.0
    var = 0.0
    for outcome, n in record.outcome_counts.items():
        lam = eigenvalues[outcome]
        value += lam * n
        var += lam**2 * n * (total - n)
    value /= total
    sigma = math.sqrt(var / total**3)
    return value, sigma


def records_to_csv(records) -> str:
    """Flat CSV export of one or more records: setting,outcome,count."""
    lines = ["setting,outcome,count"]
    for record in records:
        for outcome in sorted(record.outcome_counts):
            lines.append(f"{record.setting},{outcome},{record.outcome_counts[outcome]}")
    return "\n".join(lines) + "\n"


def derived_seed(seed: int, *indices) -> int:
    """Deterministic per-task seed stream; independent draws for parallel
    points regardless of evaluation order."""
    stream = np.random.SeedSequence(entropy=seed, spawn_key=tuple(indices))
    return int(stream.generate_state(1, dtype=np.uint64)[0] % (2**63))
