"""Noise models for the coincidence pipeline.

Two mechanisms degrade the four-fold fidelity: the source's next emission
order leaking into the coincidence window once photons can be lost, and
imperfect interference at the overlap stage. Both are modeled on top of
the exact pipeline of :mod:`bellghz.circuit`; a white-noise admixture is
included as a catch-all for everything not modeled explicitly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .circuit import (
    COINCIDENCE_PATTERN,
    PipelineConfig,
    REGISTER,
    pipeline_transform,
    run_pipeline,
    source_terms,
    spdc_term,
    to_qubits,
)
from .family import QubitState4, check_gamma, state_at
from .fock import FockState, apply_transform, postselect

#: Largest pair-emission strength the truncated expansion supports;
#: beyond this the neglected fourth order is no longer subleading.
MAX_PAIR_PROBABILITY = 0.1


@dataclass(frozen=True)
class NoiseConfig:
    """Tunable imperfection strengths, all off by default.

    pair_probability is the per-pulse pair-emission amplitude tau (the
    n-pair term is emitted with relative weight (n+1) tau^(2n));
    efficiency is the per-photon detection probability; visibility is
    the interference quality at the overlap; depolarizing_q mixes in
    white noise after everything else.
    """

    pair_probability: float = 0.0
    efficiency: float = 1.0
    visibility: float = 1.0
    depolarizing_q: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.pair_probability < 1.0:
            raise ValueError("pair_probability must lie in [0, 1)")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")
        if not 0.0 <= self.depolarizing_q <= 1.0:
            raise ValueError("depolarizing_q must lie in [0, 1]")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NoiseConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("noise configuration must be a JSON object")
        return cls(**data)


def _third_order_branches(gamma: float) -> tuple[np.ndarray, float]:
    """Coincidences the six-photon emission produces after losing two photons.

    Returns (sum over loss branches of q_L |phi_L><phi_L|, sum of q_L),
    with the efficiency factors stripped: every branch carries the same
    eta^4 (1-eta)^2 and it is reapplied by the caller. Distinct loss
    patterns mark orthogonal environment states, so branches add
    incoherently.
    """
    out = apply_transform(spdc_term(3), pipeline_transform(gamma))
    nmodes = len(REGISTER)
    rho = np.zeros((16, 16), dtype=complex)
    total = 0.0
    for i in range(nmodes):
        for j in range(i, nmodes):
            branch: dict[tuple[int, ...], complex] = {}
            for occ, amp in out.amps.items():
                lost = list(occ)
                if i == j:
                    if occ[i] < 2:
                        continue
                    factor = math.sqrt(occ[i] * (occ[i] - 1) / 2.0)
                    lost[i] -= 2
                else:
                    if occ[i] < 1 or occ[j] < 1:
                        continue
                    factor = math.sqrt(occ[i] * occ[j])
                    lost[i] -= 1
                    lost[j] -= 1
                branch[tuple(lost)] = amp * factor
            if not branch:
                continue
            kept, weight = postselect(FockState(REGISTER, branch), COINCIDENCE_PATTERN)
            if weight == 0.0:
                continue
            phi = to_qubits(kept).vec
            rho += weight * np.outer(phi, phi.conj())
            total += weight
    return rho, total


def higher_order_fourfolds(gamma: float, cfg: NoiseConfig) -> tuple[float, float]:
    """Fidelity and relative rate of four-folds once six-photon events leak in.

    A six-photon emission contributes only when exactly two photons are
    lost, so unit efficiency gives no reduction at all. The returned
    weight is the four-fold event rate per pulse to the two leading
    emission orders.
    """
    g = check_gamma(gamma)
    tau = cfg.pair_probability
    if tau > MAX_PAIR_PROBABILITY:
        raise ValueError(
            f"pair_probability {tau!r} exceeds the supported range "
            f"(<= {MAX_PAIR_PROBABILITY}); higher orders would not be negligible"
        )
    if tau == 0.0:
        return 1.0, 0.0
    eta = cfg.efficiency
    ideal, p = run_pipeline(PipelineConfig(g))
    weight_double = 3.0 * tau**4 * eta**4 * p
    if eta == 1.0:
        return 1.0, weight_double
    rho3, q3 = _third_order_branches(g)
    weight_triple = 4.0 * tau**6 * eta**4 * (1.0 - eta) ** 2 * q3
    if weight_triple == 0.0:
        return 1.0, weight_double
    overlap3 = float(np.vdot(ideal.vec, rho3 @ ideal.vec).real)
    fidelity = (weight_double + 4.0 * tau**6 * eta**4 * (1.0 - eta) ** 2 * overlap3) / (
        weight_double + weight_triple
    )
    return fidelity, weight_double + weight_triple


def visibility_noise(state: QubitState4, gamma: float, cfg: NoiseConfig) -> np.ndarray:
    """Mix the ideal state with the distinguishable-photon outcome.

    With visibility V the output is V |psi><psi| + (1-V) rho_dist, where
    rho_dist propagates each emission term separately and sums outcome
    probabilities instead of amplitudes. Where terms feed disjoint
    outcomes (gamma = 0 or pi/4) the populations are untouched.
    """
    g = check_gamma(gamma)
    v = cfg.visibility
    ideal = state.density()
    if v == 1.0:
        return ideal
    transform = pipeline_transform(g)
    mixture = np.zeros((16, 16), dtype=complex)
    total = 0.0
    for term in source_terms():
        propagated = apply_transform(term, transform)
        kept, weight = postselect(propagated, COINCIDENCE_PATTERN)
        if weight == 0.0:
            continue
        phi = to_qubits(kept).vec
        mixture += weight * np.outer(phi, phi.conj())
        total += weight
    return v * ideal + (1.0 - v) * mixture / total


def depolarize(rho: np.ndarray, q: float) -> np.ndarray:
    """White-noise admixture (1-q) rho + q I/16."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("depolarizing fraction must lie in [0, 1]")
    return (1.0 - q) * rho + q * np.eye(16, dtype=complex) / 16.0


def noisy_density_matrix(gamma: float, cfg: NoiseConfig) -> np.ndarray:
    """Four-qubit state of the pipeline under the full noise configuration.

    Applies, in order: interference visibility, six-photon contamination
    weighted by the relative event rates, and the white-noise admixture.
    With the default config this is exactly the ideal projector.
    """
    g = check_gamma(gamma)
    ideal = state_at(g).state
    rho = visibility_noise(ideal, g, cfg)
    tau = cfg.pair_probability
    eta = cfg.efficiency
    if tau > 0.0 and eta < 1.0:
        if tau > MAX_PAIR_PROBABILITY:
            raise ValueError(
                f"pair_probability {tau!r} exceeds the supported range "
                f"(<= {MAX_PAIR_PROBABILITY})"
            )
        _, p = run_pipeline(PipelineConfig(g))
        rho3, q3 = _third_order_branches(g)
        weight_double = 3.0 * tau**4 * eta**4 * p
        weight_triple = 4.0 * tau**6 * eta**4 * (1.0 - eta) ** 2 * q3
        if weight_triple > 0.0:
            rho = (weight_double * rho + weight_triple * rho3 / q3) / (
                weight_double + weight_triple
            )
    return depolarize(rho, cfg.depolarizing_q)
