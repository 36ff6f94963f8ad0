"""Measurement channels: projective (selective and non-selective), partial-strength
dephasing, subspace projection and unitary kicks.

The partial measurement of strength ``eta`` is modelled as the convex mixture
``(1 - eta) rho + eta * sum_k P_k rho P_k``. It stands in for any physical
weakening of the probe (shorter, detuned or weaker pulses) and has the right
endpoints: identity at ``eta = 0`` and full projection at ``eta = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qalg
from .errors import (
    DegenerateOutcome,
    DimensionMismatch,
    EmptySubspace,
    FullSubspace,
    IndexOutOfRange,
    InvalidProjectorSet,
    NonUnitaryKick,
    StrengthOutOfRange,
)

PROJECTOR_TOL = 1e-10
OUTCOME_FLOOR = 1e-12


@dataclass(frozen=True)
class ProjectorSet:
    """Complete set of mutually orthogonal projectors with outcome labels."""

    projectors: tuple
    labels: tuple = ()

    def __post_init__(self):
        ps = tuple(qalg.as_matrix(p) for p in self.projectors)
        if not ps:
            raise InvalidProjectorSet("projector set is empty")
        d = ps[0].shape[0]
        if any(p.shape != (d, d) for p in ps):
            raise InvalidProjectorSet("projectors differ in dimension")
        for k, p in enumerate(ps):
            if not qalg.is_hermitian(p, PROJECTOR_TOL):
                raise InvalidProjectorSet(f"projector {k} is not Hermitian")
            if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL:
                raise InvalidProjectorSet(f"projector {k} is not idempotent")
        for j in range(len(ps)):
            for k in range(j + 1, len(ps)):
                if np.max(np.abs(ps[j] @ ps[k])) > PROJECTOR_TOL:
                    raise InvalidProjectorSet(f"projectors {j} and {k} are not orthogonal")
        if np.max(np.abs(sum(ps) - np.eye(d))) > PROJECTOR_TOL:
            raise InvalidProjectorSet("projectors do not sum to the identity")
        labels = tuple(self.labels) if self.labels else tuple(str(k) for k in range(len(ps)))
        if len(labels) != len(ps):
            raise InvalidProjectorSet("one label is required per projector")
        object.__setattr__(self, "projectors", ps)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @classmethod
    def computational(cls, dim: int) -> "ProjectorSet":
        """Projectors onto each basis level, labelled by level number starting at 1."""
        return cls(
            tuple(qalg.projector(dim, k) for k in range(dim)),
            tuple(str(k + 1) for k in range(dim)),
        )


@dataclass(frozen=True)
class OutcomeRecord:
    outcome_index: int
    probability: float
    post_state: np.ndarray


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator; identical seeds give identical streams."""
    return np.random.Generator(np.random.Philox(int(seed)))


def _checked(rho, pset: ProjectorSet) -> np.ndarray:
    rho = qalg.check_density(rho)
    if rho.shape[0] != pset.dim:
        raise DimensionMismatch(f"state dimension {rho.shape[0]} does not match projectors ({pset.dim})")
    return rho


def _dephase(rho: np.ndarray, pset: ProjectorSet) -> np.ndarray:
    return sum(p @ rho @ p for p in pset.projectors)


def project_nonselective(rho, pset: ProjectorSet) -> np.ndarray:
    """Unrecorded projective measurement: rho -> sum_k P_k rho P_k."""
    return _dephase(_checked(rho, pset), pset)


def outcome_probabilities(rho, pset: ProjectorSet) -> np.ndarray:
    rho = _checked(rho, pset)
    return np.array([np.trace(p @ rho).real for p in pset.projectors])


def measure_selective(rho, pset: ProjectorSet, rng: np.random.Generator) -> OutcomeRecord:
    """Sample one outcome k with probability Tr(P_k rho) and collapse onto it.

    ``rng`` is consumed (one uniform draw) and must be owned by the caller.
    """
    rho = _checked(rho, pset)
    probs = np.clip([np.trace(p @ rho).real for p in pset.projectors], 0.0, None)
    if np.all(probs < OUTCOME_FLOOR):
        raise DegenerateOutcome("every outcome has probability below 1e-12")
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    k = min(k, len(probs) - 1)
    while probs[k] < OUTCOME_FLOOR:  # u landed on a zero-width bin edge
        k -= 1
    p = pset.projectors[k]
    return OutcomeRecord(k, float(probs[k]), p @ rho @ p / probs[k])


def partial_collapse(rho, pset: ProjectorSet, eta: float) -> np.ndarray:
    if not 0.0 <= eta <= 1.0:
        raise StrengthOutOfRange(f"measurement strength must lie in [0, 1], got {eta!r}")
    rho = _checked(rho, pset)
    return (1.0 - eta) * rho + eta * _dephase(rho, pset)


def check_kick(kick) -> np.ndarray:
    k = qalg.as_matrix(kick)
    if not qalg.is_unitary(k):
        raise NonUnitaryKick("kick operator is not unitary within 1e-10")
    return k


def apply_kick(rho, kick) -> np.ndarray:
    """Unitary kick rho -> K rho K^dagger."""
    k = check_kick(kick)
    rho = qalg.check_density(rho)
    qalg.check_same_dim(rho, k)
    return k @ rho @ qalg.dagger(k)


def subspace_projectors(dim: int, indices) -> ProjectorSet:
    """Two-outcome set {P_subspace, 1 - P_subspace} for the given level indices."""
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise EmptySubspace("subspace must contain at least one level")
    if idx[0] < 0 or idx[-1] >= dim:
        raise IndexOutOfRange(f"subspace indices {idx} outside [0, {dim})")
    if len(idx) == dim:
        raise FullSubspace("subspace must be a proper subset of the levels")
    p = np.zeros((dim, dim), dtype=complex)
    p[idx, idx] = 1.0
    return ProjectorSet((p, np.eye(dim) - p), ("inside", "outside"))
