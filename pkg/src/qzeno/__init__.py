"""Deterministic simulations of quantum Zeno, anti-Zeno and related
measurement-interrupted dynamics for small d-level systems."""

__version__ = "0.1.0"

from .dynamics import (
    DriveSegment,
    IntegratorConfig,
    JumpOperator,
    energy_variance,
    evolve_lindblad,
    evolve_unitary,
    rabi_population,
    short_time_survival,
    survival_probability,
)
from .measure import (
    OutcomeRecord,
    ProjectorSet,
    apply_kick,
    make_rng,
    measure_selective,
    partial_collapse,
    project_nonselective,
    subspace_projectors,
)
from .qalg import density_from_state, expm_hermitian, hermitian_eig
from .scenarios import (
    ExperimentResult,
    IhbwConfig,
    ReservoirConfig,
    SubspaceConfig,
    run_bangbang,
    run_ihbw_full,
    run_ihbw_ideal,
    run_partial,
    run_reversed,
    run_selective,
    run_unstable,
    run_zeno_subspace,
)
from .schedule import (
    Schedule,
    ScheduleEvent,
    equal_spacing,
    optimize_schedule,
    survival_product,
    zeno_survival_ideal,
)
