import math
import warnings

import numpy as np
import pytest

from oracles import chain_unitary_populations, kicked_p2, partial_transfer_p2
from qzeno import qalg
from qzeno.errors import ConfigInvalid, NonUnitaryKick, RecurrenceWarning
from qzeno.schedule import Schedule, equal_spacing, optimize_schedule, zeno_survival_ideal
from qzeno.scenarios import (
    SUBSPACE_LEAKAGE_CONSTANT,
    IhbwConfig,
    ReservoirConfig,
    SubspaceConfig,
    chain_hamiltonian,
    fig4_rows,
    ideal_objective,
    run_bangbang,
    run_ihbw_full,
    run_ihbw_ideal,
    run_partial,
    run_reversed,
    run_selective,
    run_unstable,
    run_zeno_subspace,
)

T = math.pi


def strong_pulse(n, fraction):
    dur = fraction * T
    return IhbwConfig(pulse_count=n, mode="full", laser_pulse_duration=dur, gamma3=100 / dur, omega_laser=50 / dur)


def assert_conserved(res, tol=1e-7):
    pops = np.array(list(res.populations.values()))
    assert np.all(pops >= -1e-9) and np.all(pops <= 1 + 1e-9)
    assert np.max(np.abs(pops.sum(axis=0) - 1)) <= tol


# -- ideal ------------------------------------------------------------------


def test_ideal_no_pulses_is_rabi():
    res = run_ihbw_ideal(IhbwConfig(pulse_count=0))
    assert res.summary["p2_final"] == pytest.approx(1.0, abs=1e-12)
    res = run_ihbw_ideal(IhbwConfig(pulse_count=0, total_time=1.3, omega_rf=2.0))
    assert res.summary["p2_final"] == pytest.approx(math.sin(1.3) ** 2, abs=1e-12)
    assert res.time_grid[0] == 0 and res.time_grid[-1] == pytest.approx(1.3)
    np.testing.assert_allclose(res.populations["p2"], np.sin(res.time_grid) ** 2, atol=1e-12)


def test_ideal_spot_values():
    assert run_ihbw_ideal(IhbwConfig(pulse_count=4)).summary["p2_final"] == pytest.approx(0.375, abs=1e-10)
    assert abs(run_ihbw_ideal(IhbwConfig(pulse_count=64)).summary["p2_final"] - 0.03713) < 1e-4


def test_ideal_master_regression():
    for n in range(1, 65):
        res = run_ihbw_ideal(IhbwConfig(pulse_count=n, samples=2))
        assert abs(res.summary["p2_final"] - zeno_survival_ideal(n)) <= 1e-10
        assert_conserved(res)


def test_ideal_projection_times_on_grid():
    res = run_ihbw_ideal(IhbwConfig(pulse_count=3, samples=5))
    for t in equal_spacing(3, T).times:
        assert np.min(np.abs(res.time_grid - t)) == 0.0


def test_ideal_rejects_full_mode():
    with pytest.raises(ConfigInvalid):
        run_ihbw_ideal(IhbwConfig(mode="full"))


@pytest.mark.parametrize(
    "kwargs, field",
    [
        ({"omega_rf": -1.0}, "omega_rf"),
        ({"pulse_count": -2}, "pulse_count"),
        ({"pulse_count": 2.5}, "pulse_count"),
        ({"init_level": 3}, "init_level"),
        ({"mode": "lab"}, "mode"),
        ({"mode": "full", "pulse_count": 10, "laser_pulse_duration": 0.5}, "laser_pulse_duration"),
        ({"samples": 1}, "samples"),
    ],
)
def test_ihbw_config_validation(kwargs, field):
    with pytest.raises(ConfigInvalid) as info:
        IhbwConfig(**kwargs)
    assert info.value.field == field


# -- full -------------------------------------------------------------------


def test_full_short_strong_pulse_limit():
    res = run_ihbw_full(strong_pulse(8, 1e-4))
    assert abs(res.summary["p2_final"] - zeno_survival_ideal(8)) < 5e-3
    assert_conserved(res)


def test_full_laser_off_is_rabi():
    res = run_ihbw_full(IhbwConfig(pulse_count=8, mode="full", omega_laser=0.0, total_time=2.0))
    assert res.summary["p2_final"] == pytest.approx(math.sin(1.0) ** 2, abs=1e-6)


def test_full_moderate_pulse_brackets():
    dur = 1e-3 * T
    res = run_ihbw_full(IhbwConfig(pulse_count=8, mode="full", laser_pulse_duration=dur, gamma3=100 / dur, omega_laser=10 / dur))
    assert zeno_survival_ideal(8) < res.summary["p2_final"] < 1.0


def test_full_convergence_sequence():
    errs = [abs(run_ihbw_full(strong_pulse(8, f)).summary["p2_final"] - zeno_survival_ideal(8)) for f in (1e-2, 1e-3, 1e-4)]
    assert errs[0] > errs[1] > errs[2]


def test_full_defaults_and_rf_flag():
    cfg = IhbwConfig(pulse_count=4, mode="full")
    assert cfg.pulse_duration == pytest.approx(1e-3 * T)
    assert cfg.decay_rate == pytest.approx(100 / cfg.pulse_duration)
    assert cfg.laser_rabi == pytest.approx(0.5 * cfg.decay_rate)
    on = run_ihbw_full(cfg).summary["p2_final"]
    off = run_ihbw_full(IhbwConfig(pulse_count=4, mode="full", rf_on_during_laser=False)).summary["p2_final"]
    assert on != off
    assert abs(on - 0.375) < 5e-3 and abs(off - 0.375) < 5e-3


def test_full_records_level_three():
    res = run_ihbw_full(IhbwConfig(pulse_count=2, mode="full"))
    assert "p3_final" in res.summary
    assert np.max(res.populations["p3"]) > 0.01  # populated during pulses


# -- reversed ---------------------------------------------------------------


@pytest.mark.parametrize("n, expected, tol", [(2, 0.5, 1e-10), (0, 1.0, 1e-10), (16, 0.13345, 1e-4)])
def test_reversed_examples(n, expected, tol):
    res = run_reversed(IhbwConfig(pulse_count=n))
    assert res.config_echo["init_level"] == 2
    assert abs(res.summary["p1_final"] - expected) < tol


def test_reversed_full_mode_inhibited():
    res = run_reversed(IhbwConfig(pulse_count=16, mode="full"))
    assert abs(res.summary["transition"] - zeno_survival_ideal(16)) < 5e-3
    # the last pulse ends at T and leaves part of level 1 parked in level 3
    s = res.summary
    assert s["transition"] == pytest.approx(s["p1_final"] + s["p3_final"], abs=1e-9)


# -- partial ----------------------------------------------------------------


def test_partial_examples():
    assert run_partial(IhbwConfig(pulse_count=8), 0.0).summary["p2_final"] == pytest.approx(1.0, abs=1e-10)
    assert abs(run_partial(IhbwConfig(pulse_count=8), 1.0).summary["p2_final"] - 0.2346) < 1e-4
    mid = run_partial(IhbwConfig(pulse_count=8), 0.5).summary["p2_final"]
    assert zeno_survival_ideal(8) < mid < 1.0
    assert abs(mid - partial_transfer_p2(8, 0.5)) < 1e-9
    # frozen Bloch-vector transfer-matrix value
    assert abs(mid - 0.44992879236960637) < 1e-9


def test_partial_rejects_bad_eta():
    with pytest.raises(ConfigInvalid):
        run_partial(IhbwConfig(pulse_count=8), 1.5)


# -- bang-bang --------------------------------------------------------------


def test_bangbang_identity_kicks_do_nothing():
    res = run_bangbang(IhbwConfig(pulse_count=8, total_time=2.0), np.eye(2))
    assert res.summary["p2_final"] == pytest.approx(math.sin(1.0) ** 2, abs=1e-12)


@pytest.mark.parametrize("n", [8, 10, 16])
def test_bangbang_sigma_z_refocuses(n):
    res = run_bangbang(IhbwConfig(pulse_count=n))
    assert res.summary["p2_final"] < 0.05
    assert abs(res.summary["p2_final"] - kicked_p2(equal_spacing(n, T).times)) < 1e-10
    assert res.summary["p2_projection"] == pytest.approx(zeno_survival_ideal(n), abs=1e-10)


def test_bangbang_single_kick_mid_pulse():
    sched = Schedule.from_times([T / 2], T)
    res = run_bangbang(IhbwConfig(pulse_count=1), schedule=sched)
    assert abs(res.summary["p2_final"] - kicked_p2([T / 2])) < 1e-12


def test_bangbang_odd_count_matches_oracle():
    res = run_bangbang(IhbwConfig(pulse_count=3))
    assert abs(res.summary["p2_final"] - kicked_p2(equal_spacing(3, T).times)) < 1e-12


def test_bangbang_rejects_non_unitary():
    with pytest.raises(NonUnitaryKick):
        run_bangbang(IhbwConfig(pulse_count=2), np.diag([1.0, 2.0]))


# -- selective trajectories --------------------------------------------------


def test_selective_matches_nonselective_small():
    res = run_selective(IhbwConfig(pulse_count=2), trajectories=2000, seed=5)
    s = res.summary
    assert abs(s["p2_mean"] - s["p2_nonselective"]) <= 3 * s["p2_stderr"]
    assert abs(s["all_survive_fraction"] - s["all_survive_closed_form"]) <= 3 * s["all_survive_stderr"]
    assert res.rng_seed == 5
    assert_conserved(res)


def test_selective_reproducible():
    a = run_selective(IhbwConfig(pulse_count=3), trajectories=300, seed=11).summary
    b = run_selective(IhbwConfig(pulse_count=3), trajectories=300, seed=11).summary
    c = run_selective(IhbwConfig(pulse_count=3), trajectories=300, seed=12).summary
    assert a == b
    assert a != c


def test_selective_closed_form_conditioned_survival():
    s = run_selective(IhbwConfig(pulse_count=4), trajectories=10, seed=0).summary
    assert s["all_survive_closed_form"] == pytest.approx(math.cos(math.pi / 8) ** 8, abs=1e-14)


# -- reservoir ----------------------------------------------------------------

RESONANT_G = math.sqrt(10.0 / (2 * math.pi * 100))


def test_unstable_decoupled():
    res = run_unstable(ReservoirConfig(mode_count=20, coupling=0.0, measurement_interval=0.3, measurement_count=7))
    assert res.summary["survival"] == pytest.approx(1.0, abs=1e-14)
    assert res.summary["effective_rate"] == pytest.approx(0.0, abs=1e-12)


def test_unstable_zeno_regime():
    surv = []
    for tau in (0.05, 0.02, 0.01):
        res = run_unstable(ReservoirConfig(100, 0.0, 10.0, RESONANT_G, tau, round(1 / tau)))
        surv.append(res.summary["survival"])
        assert_conserved(res, 1e-10)
    assert surv[0] < surv[1] < surv[2]


def test_unstable_anti_zeno_fixture():
    measured = run_unstable(ReservoirConfig(50, 10.0, 2.0, 0.2, 0.2, 100)).summary["effective_rate"]
    free = run_unstable(ReservoirConfig(50, 10.0, 2.0, 0.2, 20.0, 1)).summary["effective_rate"]
    assert measured > 1.2 * free


def test_unstable_rate_definition():
    res = run_unstable(ReservoirConfig(30, 0.0, 5.0, 0.1, 0.1, 20))
    s = res.summary
    assert s["effective_rate"] == pytest.approx(-math.log(s["survival"]) / 2.0, rel=1e-14)
    assert res.time_grid[-1] == pytest.approx(2.0)


def test_unstable_recurrence_flagged():
    cfg = ReservoirConfig(mode_count=4, band_width=10.0, coupling=0.1, measurement_interval=1.0, measurement_count=5)
    with pytest.warns(RecurrenceWarning):
        res = run_unstable(cfg)
    assert res.diagnostics["recurrence_warning"] is True


def test_unstable_no_warning_inside_horizon():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = run_unstable(ReservoirConfig(50, 0.0, 10.0, 0.1, 0.1, 10))
    assert res.diagnostics["recurrence_warning"] is False


def test_reservoir_config_validation():
    with pytest.raises(ConfigInvalid):
        ReservoirConfig(mode_count=1)
    with pytest.raises(ConfigInvalid):
        ReservoirConfig(measurement_interval=0.0)


# -- Zeno subspace --------------------------------------------------------------


def test_subspace_block_diagonal_no_leakage():
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = 0.7
    h[2, 2] = 1.3
    for n in (0, 5, 40):
        assert run_zeno_subspace(SubspaceConfig(h, (0, 1), n, 2.0)).summary["leakage"] == pytest.approx(0.0, abs=1e-12)


def test_subspace_chain_confinement():
    a = b = 1.0
    res = run_zeno_subspace(SubspaceConfig(chain_hamiltonian(a, b), (0, 1), 256, T))
    assert res.summary["leakage"] < b**2 * T**2 / 256 * SUBSPACE_LEAKAGE_CONSTANT
    assert res.summary["php_sup_deviation"] < 2e-2
    np.testing.assert_allclose(res.reference["p2"], np.sin(a * res.time_grid / 2) ** 2, atol=1e-12)
    assert_conserved(res)


def test_subspace_unmeasured_matches_diagonalisation():
    res = run_zeno_subspace(SubspaceConfig(chain_hamiltonian(1.0, 1.0), (0, 1), 0, T))
    assert res.summary["leakage"] == pytest.approx(chain_unitary_populations(1.0, 1.0, T)[2], abs=1e-12)


def test_subspace_config_validation():
    with pytest.raises(ConfigInvalid):
        SubspaceConfig(chain_hamiltonian(1, 1), (0, 1, 2))
    with pytest.raises(ConfigInvalid):
        SubspaceConfig(chain_hamiltonian(1, 1), ())
    with pytest.raises(ConfigInvalid):
        SubspaceConfig(np.array([[0, 1], [0, 0]]), (0,))


# -- optimiser objective and fig4 rows ------------------------------------------


def test_ideal_objective_optimises_below_equal_spacing():
    obj = ideal_objective(IhbwConfig())
    sched, val = optimize_schedule(2, obj, T)
    assert val <= zeno_survival_ideal(2) + 1e-9
    assert val == pytest.approx(0.4375, abs=1e-4)


def test_fig4_rows():
    rows = fig4_rows([2, 8])
    assert [r["n"] for r in rows] == [2, 8]
    assert rows[0]["simplified"] == 0.5
    assert rows[0]["no_measurement"] == pytest.approx(1.0)
    for r in rows:
        assert r["full"] >= r["simplified"] - 5e-3


def test_result_to_dict_round_numbers():
    d = run_ihbw_ideal(IhbwConfig(pulse_count=2, samples=3)).to_dict()
    assert set(d["series"]) == {"t", "p1", "p2", "p3", "trace", "purity"}
    assert d["series"]["p3"] == [0.0] * len(d["series"]["t"])
