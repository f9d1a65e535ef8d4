"""Tomography campaign simulation and density-matrix reconstruction.

The campaign measures all 81 local-basis settings (one letter of xyz per
qubit). Each setting yields 16 outcome counts, one per +/- tuple, drawn
from independent Poisson distributions; reconstruction inverts the
relative frequencies back into Pauli expectations.

Outcome indexing matches the qubit basis: outcome bit 0 is +, bit 1 is -,
and slot k of a setting or outcome string is qubit k+1.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import AXES, PAULI, WitnessReport, as_density, evaluate_witness
from .family import check_gamma
from .imperfections import NoiseConfig, noisy_density_matrix

#: All 81 measurement settings in lexicographic order.
SETTINGS = tuple("".join(s) for s in itertools.product("xyz", repeat=4))
_SETTING_INDEX = {s: i for i, s in enumerate(SETTINGS)}

#: Outcome strings in index order, "++++" through "----".
OUTCOMES = tuple(
    "".join("+-"[(o >> (3 - k)) & 1] for k in range(4)) for o in range(16)
)

_DM_TOL = 1e-9

# Bras of the +/- eigenvectors per measurement letter, row 0 = +.
_BRAS = {
    "x": np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0),
    "y": np.array([[1.0, -1.0j], [1.0, 1.0j]], dtype=complex) / math.sqrt(2.0),
    "z": np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex),
}

# sign of outcome o at slot k, and their products over slot subsets
_SIGNS = np.array(
    [[1 - 2 * ((o >> (3 - k)) & 1) for k in range(4)] for o in range(16)]
)
_SUBSET_SIGNS = np.array(
    [
        [
            math.prod(_SIGNS[o, k] for k in range(4) if mask & (1 << (3 - k)))
            for o in range(16)
        ]
        for mask in range(16)
    ],
    dtype=float,
)


def _setting_bra(setting: str) -> np.ndarray:
    b = _BRAS[setting[0]]
    for letter in setting[1:]:
        b = np.kron(b, _BRAS[letter])
    return b


_SETTING_BRAS = {s: _setting_bra(s) for s in SETTINGS}


def _pauli_stack() -> np.ndarray:
    mats = []
    for labels in itertools.product(AXES, repeat=4):
        m = PAULI[labels[0]]
        for a in labels[1:]:
            m = np.kron(m, PAULI[a])
        mats.append(m)
    return np.array(mats)


_SIGMA = _pauli_stack()
_TERM_INDEX = {
    "".join(t): i for i, t in enumerate(itertools.product(AXES, repeat=4))
}


@dataclass(frozen=True)
class CountRecord:
    """Observed (or idealized) counts of one measurement setting.

    ``shots`` is the duration equivalent: the expected total number of
    events for the setting. Simulated counts are integers; exact
    frequency records carry the unrounded expectations.
    """

    setting: str
    counts: tuple[float, ...]
    shots: float

    def __post_init__(self):
        if self.setting not in _SETTING_INDEX:
            raise ValueError(f"unknown setting {self.setting!r}")
        if len(self.counts) != 16:
            raise ValueError("need one count per 16 outcomes")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        if self.shots <= 0:
            raise ValueError("shots must be positive")


@dataclass(frozen=True)
class DensityMatrix:
    """Reconstructed 16x16 state, Hermitian with unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (16, 16):
            raise ValueError("density matrix must be 16x16")
        if np.abs(mat - mat.conj().T).max() > _DM_TOL:
            raise ValueError("density matrix must be Hermitian")
        if abs(mat.trace() - 1.0) > _DM_TOL:
            raise ValueError("density matrix must have unit trace")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_json(self) -> str:
        return json.dumps(
            {"real": self.matrix.real.tolist(), "imag": self.matrix.imag.tolist()},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        data = json.loads(text)
        if not isinstance(data, dict) or set(data) != {"real", "imag"}:
            raise ValueError("expected a JSON object with 'real' and 'imag'")
        return cls(np.array(data["real"]) + 1j * np.array(data["imag"]))


def setting_probabilities(state, setting: str) -> np.ndarray:
    """Born-rule outcome probabilities of one setting, in outcome order."""
    rho = as_density(state)
    bra = _SETTING_BRAS[setting]
    probs = np.einsum("ij,jk,ik->i", bra, rho, bra.conj()).real
    return np.clip(probs, 0.0, None)


def simulate_counts(state, shots_per_setting: float, seed: int) -> list[CountRecord]:
    """Poisson counts for the whole campaign, one RNG stream per setting.

    The stream for setting i is seeded with (seed, i), so any subset of
    settings can be regenerated independently and in any order.
    """
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be at least 1")
    rho = as_density(state)
    records = []
    for i, setting in enumerate(SETTINGS):
        rng = np.random.default_rng([seed, i])
        means = shots_per_setting * setting_probabilities(rho, setting)
        counts = rng.poisson(means)
        records.append(CountRecord(setting, tuple(int(c) for c in counts),
                                   float(shots_per_setting)))
    return records


def exact_frequency_records(state, shots: float = 1.0) -> list[CountRecord]:
    """Infinite-statistics records: counts equal shots times probability."""
    rho = as_density(state)
    return [
        CountRecord(s, tuple(float(shots) * setting_probabilities(rho, s)), float(shots))
        for s in SETTINGS
    ]


def _project_to_physical(mat: np.ndarray) -> np.ndarray:
    """Nearest PSD unit-trace matrix in Frobenius norm.

    Works on the spectrum: eigenvalues are projected onto the probability
    simplex (shift by a constant, clip at zero, renormalize via the shift).
    """
    vals, vecs = np.linalg.eigh(mat)
    u = np.sort(vals)[::-1]
    cumulative = np.cumsum(u)
    k = np.nonzero(u * np.arange(1, len(u) + 1) > (cumulative - 1.0))[0][-1]
    theta = (cumulative[k] - 1.0) / (k + 1)
    clipped = np.maximum(vals - theta, 0.0)
    return (vecs * clipped) @ vecs.conj().T


RECONSTRUCTION_METHODS = ("linear-inversion", "physical-projection")


def reconstruct(records: Iterable[CountRecord], method: str = "linear-inversion") -> DensityMatrix:
    """Invert relative frequencies into a density matrix.

    Every Pauli expectation with an identity slot is averaged over the
    3^(number of identity slots) settings that measure it. Linear
    inversion is exact on exact frequencies; physical projection
    additionally moves the spectrum to the nearest PSD unit-trace point.
    """
    if method not in RECONSTRUCTION_METHODS:
        raise ValueError(f"method must be one of {RECONSTRUCTION_METHODS}")
    by_setting: dict[str, CountRecord] = {}
    for rec in records:
        if rec.setting in by_setting:
            raise ValueError(f"duplicate record for setting {rec.setting!r}")
        by_setting[rec.setting] = rec
    missing = [s for s in SETTINGS if s not in by_setting]
    if missing:
        raise ValueError(
            f"missing {len(missing)} of 81 settings (first: {missing[0]!r})"
        )

    sums = np.zeros(256)
    hits = np.zeros(256)
    for setting in SETTINGS:
        rec = by_setting[setting]
        counts = np.asarray(rec.counts, dtype=float)
        total = counts.sum()
        if total <= 0:
            raise ValueError(f"setting {setting!r} has all-zero counts")
        expectations = _SUBSET_SIGNS @ (counts / total)
        for mask in range(16):
            label = "".join(
                setting[k] if mask & (1 << (3 - k)) else "0" for k in range(4)
            )
            idx = _TERM_INDEX[label]
            sums[idx] += expectations[mask]
            hits[idx] += 1.0
    tensor = sums / hits
    mat = np.einsum("t,tij->ij", tensor, _SIGMA) / 16.0
    if method == "physical-projection":
        mat = _project_to_physical(mat)
    return DensityMatrix(mat)


def reconstruct_and_report(
    gamma: float,
    cfg: NoiseConfig,
    shots: float | None = None,
    seed: int = 0,
    method: str = "physical-projection",
) -> tuple[WitnessReport, DensityMatrix]:
    """End-to-end loop: noisy state, counts, reconstruction, witness.

    ``shots=None`` uses exact frequencies instead of Poisson sampling.
    """
    g = check_gamma(gamma)
    rho = noisy_density_matrix(g, cfg)
    if shots is None:
        records = exact_frequency_records(rho)
    else:
        records = simulate_counts(rho, shots, seed)
    dm = reconstruct(records, method=method)
    return evaluate_witness(dm, g), dm


def write_counts(records: Sequence[CountRecord], path) -> None:
    """CSV dump with header setting,outcome,count; one row per outcome."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["setting", "outcome", "count"])
        for rec in records:
            for outcome, count in zip(OUTCOMES, rec.counts):
                as_int = int(count)
                writer.writerow(
                    [rec.setting, outcome, as_int if as_int == count else f"{count:.12g}"]
                )


def read_counts(path) -> list[CountRecord]:
    """Read a counts CSV back into records, tolerating missing zero rows."""
    table: dict[str, np.ndarray] = {}
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["setting", "outcome", "count"]:
            raise ValueError("expected header setting,outcome,count")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"malformed row: {row!r}")
            setting, outcome, count = row
            if setting not in _SETTING_INDEX:
                raise ValueError(f"unknown setting {setting!r}")
            if outcome not in OUTCOMES:
                raise ValueError(f"unknown outcome {outcome!r}")
            table.setdefault(setting, np.zeros(16))
            table[setting][OUTCOMES.index(outcome)] += float(count)
    records = []
    for setting in SETTINGS:
        if setting in table:
            counts = table[setting]
            if counts.sum() <= 0:
                raise ValueError(f"setting {setting!r} has all-zero counts")
            records.append(CountRecord(setting, tuple(counts), float(counts.sum())))
    return records
