"""Time evolution: exact unitary propagation, short-time survival algebra, and a
fixed-step RK4 Lindblad integrator.

Units: hbar = 1, all frequencies angular. Hamiltonians are piecewise constant;
a time-dependent drive is a list of ``DriveSegment``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qalg
from .errors import (
    DimensionMismatch,
    InvalidDuration,
    NegativeRate,
    NonHermitianInput,
    TraceDriftExceeded,
)

LINDBLAD_HERMITIAN_TOL = 1e-9
LINDBLAD_EIGENVALUE_FLOOR = -1e-7


@dataclass(frozen=True)
class DriveSegment:
    hamiltonian: np.ndarray
    duration: float

    def __post_init__(self):
        h = qalg.as_matrix(self.hamiltonian)
        if not qalg.is_hermitian(h):
            raise NonHermitianInput("segment Hamiltonian is not Hermitian within 1e-10")
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise InvalidDuration(f"segment duration must be finite and >= 0, got {self.duration!r}")
        object.__setattr__(self, "hamiltonian", h)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class JumpOperator:
    """Collapse operator ``operator`` acting at ``rate`` (inverse time)."""

    operator: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "operator", qalg.as_matrix(self.operator))
        if not self.rate >= 0:
            raise NegativeRate(f"jump rate must be >= 0, got {self.rate!r}")


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``steps`` is the minimum number of RK4 steps across one call's segment.
    ``max_step_scale`` additionally caps ``h * ||L||`` so stiff decay rates
    stay inside the RK4 stability region; set it to ``None`` to use exactly
    ``steps`` steps.
    """

    steps: int = 5000
    trace_drift_limit: float = 1e-7
    max_step_scale: float | None = 0.1

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        if not self.trace_drift_limit > 0:
            raise ValueError("trace_drift_limit must be > 0")
        if self.max_step_scale is not None and not self.max_step_scale > 0:
            raise ValueError("max_step_scale must be > 0 or None")


def rabi_population(omega: float, t: float) -> float:
    """Upper-level population sin^2(omega t / 2) of a resonantly driven two-level system."""
    return math.sin(0.5 * omega * t) ** 2


def evolve_unitary(state, segment: DriveSegment) -> np.ndarray:
    """Propagate a density matrix through ``rho -> U rho U^dagger``."""
    rho = qalg.check_density(state)
    qalg.check_same_dim(rho, segment.hamiltonian)
    u = qalg.expm_hermitian(segment.hamiltonian, segment.duration)
    return u @ rho @ qalg.dagger(u)


def survival_probability(h, psi, t: float) -> float:
    h = qalg.as_matrix(h)
    v = qalg.check_state(psi)
    qalg.check_same_dim(h, np.empty((v.size, v.size)))
    amp = np.vdot(v, qalg.expm_hermitian(h, t) @ v)
    return float(min(1.0, max(0.0, abs(amp) ** 2)))


def energy_variance(h, psi) -> float:
    """Return <H^2> - <H>^2 for the pure state ``psi``."""
    h = qalg.as_matrix(h)
    if not qalg.is_hermitian(h):
        raise NonHermitianInput("Hamiltonian is not Hermitian within 1e-10")
    v = qalg.check_state(psi)
    if v.size != h.shape[0]:
        raise DimensionMismatch(f"state dimension {v.size} does not match {h.shape[0]}")
    hv = h @ v
    mean = np.vdot(v, hv).real
    return float(np.vdot(hv, hv).real - mean**2)


def short_time_survival(h, psi, t: float) -> float:
    """Quadratic short-time approximation 1 - (dH)^2 t^2.

    Only meaningful while ``dH * t`` is small; no clipping is applied.
    """
    return 1.0 - energy_variance(h, psi) * t * t


def liouvillian(h: np.ndarray, jumps=()) -> np.ndarray:
    """Lindblad generator acting on the row-major vectorisation of rho."""
    h = qalg.as_matrix(h)
    d = h.shape[0]
    eye = np.eye(d)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for j in jumps:
        op = j.operator
        if op.shape != h.shape:
            raise DimensionMismatch(f"jump operator shape {op.shape} does not match {h.shape}")
        if j.rate == 0:
            continue
        ldl = qalg.dagger(op) @ op
        gen = gen + j.rate * (
            np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)
        )
    return gen


def rk4_step_count(gen: np.ndarray, duration: float, cfg: IntegratorConfig) -> int:
    steps = int(cfg.steps)
    if cfg.max_step_scale is not None and duration > 0:
        scale = np.linalg.norm(gen, ord=np.inf) * duration / cfg.max_step_scale
        steps = max(steps, int(math.ceil(scale)))
    return steps


def rk4_propagator(gen: np.ndarray, duration: float, steps: int) -> np.ndarray:
    """Exact linear map of ``steps`` classical RK4 steps for d(vec rho)/dt = gen @ vec rho.

    For a constant generator one RK4 step is the degree-4 Taylor polynomial of
    ``h * gen``; repeated steps are its matrix power.
    """
    hl = gen * (duration / steps)
    eye = np.eye(gen.shape[0], dtype=complex)
    term = eye
    step = eye.copy()
    for k in range(1, 5):
        term = term @ hl / k
        step = step + term
    return np.linalg.matrix_power(step, steps)


def lindblad_propagator(segment: DriveSegment, jumps, cfg: IntegratorConfig) -> np.ndarray:
    for j in jumps:
        if j.rate < 0:
            raise NegativeRate(f"jump rate must be >= 0, got {j.rate!r}")
    gen = liouvillian(segment.hamiltonian, jumps)
    if segment.duration == 0:
        return np.eye(gen.shape[0], dtype=complex)
    return rk4_propagator(gen, segment.duration, rk4_step_count(gen, segment.duration, cfg))


def apply_superoperator(prop: np.ndarray, rho: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    """Apply a vectorised propagator and enforce the integrator's validity limits."""
    d = rho.shape[0]
    out = (prop @ rho.reshape(-1)).reshape(d, d)
    if not np.all(np.isfinite(out)):
        raise TraceDriftExceeded("integrator produced non-finite entries; step size too coarse")
    herm_dev = float(np.max(np.abs(out - qalg.dagger(out))))
    if herm_dev > LINDBLAD_HERMITIAN_TOL:
        raise TraceDriftExceeded(f"Hermiticity lost (deviation {herm_dev:.3e}); step size too coarse")
    out = 0.5 * (out + qalg.dagger(out))
    drift = abs(float(np.trace(out).real) - 1.0)
    if drift > cfg.trace_drift_limit:
        raise TraceDriftExceeded(f"trace drift {drift:.3e} exceeds {cfg.trace_drift_limit:.1e}")
    lam = float(np.linalg.eigvalsh(out)[0])
    if lam < LINDBLAD_EIGENVALUE_FLOOR:
        raise TraceDriftExceeded(f"minimum eigenvalue {lam:.3e} below {LINDBLAD_EIGENVALUE_FLOOR:.0e}")
    return out


def evolve_lindblad(
    state,
    segment: DriveSegment,
    jumps=(),
    cfg: IntegratorConfig = IntegratorConfig(),
) -> np.ndarray:
    """Integrate d rho/dt = -i[H, rho] + sum_k g_k (L rho L^+ - {L^+ L, rho}/2) over one segment."""
    rho = qalg.check_density(state)
    qalg.check_same_dim(rho, segment.hamiltonian)
    return apply_superoperator(lindblad_propagator(segment, list(jumps), cfg), rho, cfg)
