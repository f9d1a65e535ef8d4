"""Correlation tensors, entanglement witnesses, and structural state checks.

Everything here works on four-qubit states in the computational basis of
:mod:`bellghz.family` (H is the +z eigenstate, qubit order e, f, g, h).
Density matrices are accepted anywhere a state is, as plain 16x16 arrays
or as objects carrying a ``matrix`` attribute.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .family import CLASS_NAMES, QubitState4, check_gamma, state_at

#: Axis labels of the correlation tensor, in index order.
AXES = "0xyz"
#: Labels a measurement setting may take (the identity is not a setting).
SETTING_AXES = "xyz"

PAULI = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
_PAULI_STACK = np.stack([PAULI[a] for a in AXES])

DM_TOL = 1e-9
#: 3-tangle magnitudes below this count as zero (W class).
THREE_TANGLE_ZERO = 1e-6


def as_density(state) -> np.ndarray:
    """Coerce a state, 16x16 array, or ``.matrix`` carrier to a density matrix.

    Raises ValueError unless the result is Hermitian with unit trace to
    within DM_TOL.
    """
    if isinstance(state, QubitState4):
        mat = state.density()
    else:
        mat = np.asarray(getattr(state, "matrix", state), dtype=complex)
    if mat.shape != (16, 16):
        raise ValueError("density matrix must be 16x16")
    if np.abs(mat - mat.conj().T).max() > DM_TOL:
        raise ValueError("density matrix must be Hermitian")
    if abs(mat.trace() - 1.0) > DM_TOL:
        raise ValueError("density matrix must have unit trace")
    return mat


@dataclass(frozen=True)
class CorrelationTensor:
    """Expectation values T[i,j,k,l] of sigma_i x sigma_j x sigma_k x sigma_l.

    Indices run over AXES; entries are real and T_0000 = 1 for any
    unit-trace input.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (4, 4, 4, 4):
            raise ValueError("need a 4x4x4x4 real tensor")
        if abs(vals[0, 0, 0, 0] - 1.0) > DM_TOL or np.abs(vals).max() > 1.0 + DM_TOL:
            raise ValueError("values are not correlations of a unit-trace state")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __getitem__(self, labels: str) -> float:
        return float(self.values[tuple(AXES.index(a) for a in labels)])

    def purity(self) -> float:
        """Tr(rho^2) reassembled from the tensor; 1 for pure states."""
        return float(np.sum(self.values**2) / 16.0)

    def nonzero_terms(self, tol: float = 1e-10) -> tuple[str, ...]:
        """Labels of entries with |T| > tol, in lexicographic index order."""
        return tuple(
            "".join(AXES[i] for i in idx)
            for idx in itertools.product(range(4), repeat=4)
            if abs(self.values[idx]) > tol
        )


def correlations(state) -> CorrelationTensor:
    """Full Pauli correlation tensor of a normalized state or density matrix."""
    rho = as_density(state).reshape((2,) * 8)
    t = np.einsum(
        "abcdefgh,iea,jfb,kgc,lhd->ijkl",
        rho,
        _PAULI_STACK,
        _PAULI_STACK,
        _PAULI_STACK,
        _PAULI_STACK,
    )
    if np.abs(t.imag).max() > 1e-12:
        raise ValueError("correlations of a Hermitian input must be real")
    return CorrelationTensor(t.real)


def _orbit(pattern: str) -> frozenset[str]:
    """Closure of a label pattern under the symmetries of the family.

    Generators: swap within the first pair, swap within the second pair,
    swap the two pairs.
    """
    seen = {pattern}
    frontier = [pattern]
    while frontier:
        t = frontier.pop()
        for u in (t[1] + t[0] + t[2:], t[:2] + t[3] + t[2], t[2:] + t[:2]):
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return frozenset(seen)


#: Members of each modulus class of the family's correlation tensor.
CLASS_MEMBERS = {
    "iiii": frozenset(a * 4 for a in AXES),
    "0z0z": _orbit("0z0z") | _orbit("xyxy"),
    "00zz": _orbit("00zz") | _orbit("xxyy"),
    "0x0x": frozenset().union(*(_orbit(i + j + i + j) for i in "0z" for j in "xy")),
    "00xx": frozenset().union(*(_orbit(i + i + j + j) for i in "0z" for j in "xy")),
}

_CLASS_REPRESENTATIVE = {"iiii": "zzzz", "0z0z": "0z0z", "00zz": "00zz",
                         "0x0x": "0x0x", "00xx": "00xx"}


def correlation_classes(gamma: float) -> dict[str, float]:
    """Moduli of the five correlation classes from the full tensor.

    This is the numeric counterpart of :func:`bellghz.family.class_moduli`.
    All members of a class must agree in modulus to 1e-10; disagreement
    signals a basis-convention bug and raises RuntimeError.
    """
    g = check_gamma(gamma)
    tensor = correlations(state_at(g).state)
    out = {}
    for name in CLASS_NAMES:
        moduli = sorted(abs(tensor[m]) for m in CLASS_MEMBERS[name])
        if moduli[-1] - moduli[0] > 1e-10:
            raise RuntimeError(
                f"correlation class {name} is not degenerate at gamma={g!r}: "
                f"spread {moduli[-1] - moduli[0]:.3e}"
            )
        out[name] = abs(tensor[_CLASS_REPRESENTATIVE[name]])
    return out


def fidelity(rho, gamma: float) -> float:
    """Overlap of rho with the ideal family state at gamma."""
    g = check_gamma(gamma)
    target = state_at(g).state.vec
    mat = as_density(rho)
    return float(np.vdot(target, mat @ target).real)


#: The 7 bipartitions of four qubits: every cut is named by its smaller
#: side, with qubit 0 kept on the named side for the 2|2 cuts.
BIPARTITIONS = ((0,), (1,), (2,), (3,), (0, 1), (0, 2), (0, 3))


def biseparable_bound(gamma: float) -> float:
    """Maximal overlap of the family state with any biseparable state.

    Equals the largest squared Schmidt coefficient over the 7 bipartitions,
    by singular-value decomposition of the reshaped amplitude matrix.
    """
    g = check_gamma(gamma)
    vec = state_at(g).state.vec.reshape(2, 2, 2, 2)
    best = 0.0
    for cut in BIPARTITIONS:
        rest = tuple(q for q in range(4) if q not in cut)
        mat = vec.transpose(cut + rest).reshape(2 ** len(cut), -1)
        top = np.linalg.svd(mat, compute_uv=False)[0]
        best = max(best, float(top**2))
    return best


class WitnessReport(NamedTuple):
    c: float
    fidelity: float
    witness_value: float
    detected: bool


def evaluate_witness(rho, gamma: float) -> WitnessReport:
    """Generic witness value c(gamma) - F(rho); negative means entanglement."""
    c = biseparable_bound(gamma)
    f = fidelity(rho, gamma)
    return WitnessReport(c, f, c - f, c - f < 0.0)


_PSI_PLUS = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)


def pairwise_witness(state) -> tuple[float, float]:
    """Tr(W rho_pair) with W = I/2 - |psi+><psi+| on qubit pairs (1,2), (3,4).

    Negative values certify entanglement within the pair; the bound 1/2 is
    the maximal |psi+| overlap of separable two-qubit states.
    """
    rho = as_density(state).reshape((2,) * 8)
    front = np.einsum("abcdefcd->abef", rho).reshape(4, 4)
    back = np.einsum("abcdabgh->cdgh", rho).reshape(4, 4)

    def value(pair_rho: np.ndarray) -> float:
        return 0.5 - float(np.vdot(_PSI_PLUS, pair_rho @ _PSI_PLUS).real)

    return (value(front), value(back))


@dataclass(frozen=True)
class SettingCover:
    """A set of local measurement settings determining the fidelity.

    ``covered_terms`` maps each setting to every non-zero correlation term
    it yields; a setting yields all terms whose label at each slot is
    either 0 or the setting's letter there.
    """

    settings: tuple[str, ...]
    covered_terms: dict[str, tuple[str, ...]]


MAX_COVER_SETTINGS = 21


def _setting_yields(setting: str, term: str) -> bool:
    return all(t in ("0", s) for t, s in zip(term, setting))


def setting_cover(gamma: float) -> SettingCover:
    """Greedy cover of the non-zero correlation terms by local settings.

    Ties break toward the lexicographically first setting, so the output
    is deterministic. Raises RuntimeError if more than MAX_COVER_SETTINGS
    settings would be needed; the family never requires that many.
    """
    g = check_gamma(gamma)
    terms = correlations(state_at(g).state).nonzero_terms()
    candidates = ["".join(s) for s in itertools.product(SETTING_AXES, repeat=4)]
    yields = {s: frozenset(t for t in terms if _setting_yields(s, t)) for s in candidates}

    uncovered = set(terms)
    chosen: list[str] = []
    while uncovered:
        # max keeps the first maximum; candidates are lexicographic
        best = max(candidates, key=lambda s: len(yields[s] & uncovered))
        chosen.append(best)
        uncovered -= yields[best]
        if len(chosen) > MAX_COVER_SETTINGS:
            raise RuntimeError(
                f"cover needs more than {MAX_COVER_SETTINGS} settings at gamma={g!r}"
            )
    return SettingCover(
        settings=tuple(chosen),
        covered_terms={s: tuple(sorted(yields[s])) for s in chosen},
    )


def fidelity_from_cover(rho, gamma: float, cover: SettingCover | None = None) -> float:
    """Fidelity to the family state assembled only from covered terms.

    Exact for any rho: the target's projector expands over precisely the
    non-zero terms, all of which the cover yields.
    """
    g = check_gamma(gamma)
    if cover is None:
        cover = setting_cover(g)
    target = correlations(state_at(g).state)
    measured = correlations(rho)
    terms = set().union(*cover.covered_terms.values())
    return sum(target[t] * measured[t] for t in sorted(terms)) / 16.0


def haar_qubit_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary (QR of a complex Gaussian, phases fixed)."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def lu_invariance_check(gamma: float, trials: int = 100, seed: int = 7) -> float:
    """Max deviation of |<psi|U x U x U x U|psi>| from 1 over random U.

    Near zero only for states invariant under collective local unitaries;
    order one for generic family members.
    """
    g = check_gamma(gamma)
    vec = state_at(g).state.vec
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(int(trials)):
        u = haar_qubit_unitary(rng)
        u4 = np.kron(np.kron(u, u), np.kron(u, u))
        worst = max(worst, abs(1.0 - abs(np.vdot(vec, u4 @ vec))))
    return worst


def three_tangle(vec) -> float:
    """Residual tangle of a three-qubit pure state, 4|Det| of the amplitudes.

    Det is the degree-4 hyperdeterminant of the 2x2x2 amplitude tensor;
    it vanishes on product and W-class states and reaches 1/4 on GHZ.
    """
    a = np.asarray(vec, dtype=complex).reshape(8)
    norm = np.linalg.norm(a)
    if norm < 1e-12:
        raise ValueError("cannot compute the tangle of a null vector")
    a = a / norm
    d1 = (a[0] * a[7]) ** 2 + (a[1] * a[6]) ** 2 + (a[2] * a[5]) ** 2 + (a[4] * a[3]) ** 2
    d2 = (
        a[0] * a[7] * (a[3] * a[4] + a[5] * a[2] + a[6] * a[1])
        + a[3] * a[4] * a[5] * a[2]
        + a[3] * a[4] * a[6] * a[1]
        + a[5] * a[2] * a[6] * a[1]
    )
    d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4]
    return float(4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3))


class DickeProjection(NamedTuple):
    state: np.ndarray
    probability: float
    label: str
    tangle: float


_PROJECTION_VECTORS = {
    ("HV", "H"): np.array([1.0, 0.0], dtype=complex),
    ("HV", "V"): np.array([0.0, 1.0], dtype=complex),
    ("PM", "+"): np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    ("PM", "-"): np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
}


def dicke_projection(basis: str, outcome: str) -> DickeProjection:
    """Project qubit 4 of the Dicke state; classify the 3-qubit residue.

    Measuring in HV leaves W-class states, measuring in PM leaves
    GHZ-class states. The label is not taken on faith: the 3-tangle of
    the residue is computed and must match.
    """
    try:
        probe = _PROJECTION_VECTORS[(basis, outcome)]
    except KeyError:
        raise ValueError(
            "basis must be 'HV' (outcomes 'H','V') or 'PM' (outcomes '+','-')"
        ) from None
    vec = state_at(math.pi / 12).state.vec.reshape(8, 2)
    residue = vec @ probe.conj()
    prob = float(np.real(np.vdot(residue, residue)))
    if prob <= 1e-12:
        raise ValueError("projection outcome has zero probability")
    residue = residue / math.sqrt(prob)
    tangle = three_tangle(residue)
    label = "GHZ" if tangle > THREE_TANGLE_ZERO else "W"
    expected = "W" if basis == "HV" else "GHZ"
    if label != expected:
        raise RuntimeError(f"tangle check failed for {basis}/{outcome}: {tangle!r}")
    return DickeProjection(residue, prob, label, tangle)
