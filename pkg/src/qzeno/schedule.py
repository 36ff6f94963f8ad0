"""Measurement/kick schedules over a drive interval [0, T], closed-form Zeno
predictions, and a deterministic timing optimizer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidCount, InvalidDuration, InvalidSchedule, ObjectiveEvaluationFailed

# (dH) * T / n below this counts as inside the quadratic regime.
PRODUCT_VALIDITY_LIMIT = 0.1


@dataclass(frozen=True)
class InstantProjection:
    """Instantaneous non-selective projection in the computational basis."""


@dataclass(frozen=True)
class FinitePulse:
    """Optical pulse of finite ``duration`` that ends at the event time."""

    duration: float
    strength: float = 1.0

    def __post_init__(self):
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise InvalidDuration(f"pulse duration must be >= 0, got {self.duration!r}")
        if not 0.0 <= self.strength <= 1.0:
            raise InvalidSchedule(f"pulse strength must lie in [0, 1], got {self.strength!r}")


@dataclass(frozen=True, eq=False)
class UnitaryKick:
    unitary: np.ndarray


@dataclass(frozen=True)
class ScheduleEvent:
    time: float
    kind: object = InstantProjection()


@dataclass(frozen=True)
class Schedule:
    total_time: float
    events: tuple = ()

    def __post_init__(self):
        if not (self.total_time > 0 and math.isfinite(self.total_time)):
            raise InvalidDuration(f"total time must be > 0, got {self.total_time!r}")
        events = tuple(self.events)
        prev = -math.inf
        for k, ev in enumerate(events):
            start = ev.time - ev.kind.duration if isinstance(ev.kind, FinitePulse) else ev.time
            if not 0.0 <= ev.time <= self.total_time:
                raise InvalidSchedule(f"event {k} at t={ev.time!r} lies outside [0, {self.total_time!r}]")
            if ev.time <= prev:
                raise InvalidSchedule(f"event {k} is not strictly later than event {k - 1}")
            if start < 0.0 or (k > 0 and start < prev):
                raise InvalidSchedule(f"pulse of event {k} overlaps the previous event or t=0")
            prev = ev.time
        object.__setattr__(self, "events", events)

    @property
    def times(self) -> list[float]:
        return [ev.time for ev in self.events]

    def __len__(self):
        return len(self.events)

    @classmethod
    def from_times(cls, times, total_time: float, kind=InstantProjection()) -> "Schedule":
        return cls(total_time, tuple(ScheduleEvent(float(t), kind) for t in times))


def _check_count(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidCount(f"count must be a positive integer, got {n!r}")
    return int(n)


def equal_spacing(n: int, total_time: float, kind=InstantProjection()) -> Schedule:
    """``n`` events at T/n, 2T/n, ..., T."""
    n = _check_count(n)
    if not (total_time > 0 and math.isfinite(total_time)):
        raise InvalidDuration(f"total time must be > 0, got {total_time!r}")
    times = [k * total_time / n for k in range(1, n + 1)]
    times[-1] = float(total_time)
    return Schedule.from_times(times, total_time, kind)


def zeno_survival_ideal(n: int) -> float:
    """Transition probability (1 - cos^n(pi/n)) / 2 after a pi-pulse with n ideal projections."""
    n = _check_count(n)
    return 0.5 * (1.0 - math.cos(math.pi / n) ** n)


class SurvivalProduct(NamedTuple):
    value: float
    valid: bool


def survival_product(n: int, variance: float, total_time: float) -> SurvivalProduct:
    """Evaluate [1 - (dH)^2 (T/n)^2]^n.

    The value is returned even outside the quadratic regime, where it can be
    negative; ``valid`` reports whether dH*T/n <= PRODUCT_VALIDITY_LIMIT.
    """
    n = _check_count(n)
    if variance < 0:
        raise ValueError(f"energy variance must be >= 0, got {variance!r}")
    x = variance * (total_time / n) ** 2
    if x < 1.0:
        # log1p keeps n * ln(1 - x) accurate when n is large and x tiny
        value = math.exp(n * math.log1p(-x))
    else:
        value = (1.0 - x) ** n
    return SurvivalProduct(value, math.sqrt(x) <= PRODUCT_VALIDITY_LIMIT)


def _grid_size(n: int, max_candidates: int, target: int = 24) -> int:
    for m in range(max(1, math.ceil(target / n)), 0, -1):
        if math.comb(n * m, n) <= max_candidates:
            return n * m
    return n


def optimize_schedule(
    n: int,
    objective: Callable[[Schedule], float],
    total_time: float,
    *,
    max_grid_candidates: int = 20000,
    tol: float = 1e-12,
    max_evaluations: int = 200_000,
    map_fn: Callable = map,
) -> tuple[Schedule, float]:
    """Minimise ``objective`` over the times of ``n`` instantaneous events in (0, T].

    A coarse grid over ordered event times (grid spacing T/G with G a multiple
    of ``n``, so equal spacing is always a candidate) picks the start point;
    coordinate descent with a halving step then refines it. No randomness is
    involved. ``map_fn`` may be an executor's ``map`` to evaluate grid
    candidates concurrently; results do not depend on evaluation order.
    """
    n = _check_count(n)
    equal = equal_spacing(n, total_time)
    evaluations = 0

    def evaluate(times) -> float:
        nonlocal evaluations
        evaluations += 1
        sched = times if isinstance(times, Schedule) else Schedule.from_times(times, total_time)
        try:
            val = float(objective(sched))
        except Exception as exc:
            raise ObjectiveEvaluationFailed(f"objective raised at times {sched.times}: {exc}") from exc
        if not math.isfinite(val):
            raise ObjectiveEvaluationFailed(f"objective returned {val!r} at times {sched.times}")
        return val

    g = _grid_size(n, max_grid_candidates)
    grid = [min(total_time, j * total_time / g) for j in range(1, g + 1)]
    candidates = [equal.times] + [list(c) for c in itertools.combinations(grid, n)]
    values = list(map_fn(evaluate, candidates))
    evaluations = len(values)
    best_idx = int(np.argmin(values))
    x = np.array(candidates[best_idx], dtype=float)
    best = values[best_idx]

    step = total_time / (2 * g)
    while step > tol * total_time and evaluations < max_evaluations:
        improved = False
        for i in range(n):
            for sign in (-1.0, 1.0):
                cand = x.copy()
                cand[i] = min(total_time, cand[i] + sign * step)
                lo = cand[i - 1] if i > 0 else 0.0
                hi = cand[i + 1] if i + 1 < n else math.inf
                if not lo < cand[i] < hi or cand[i] == x[i]:
                    continue
                val = evaluate(cand)
                if val < best:
                    x, best, improved = cand, val, True
                    break
        if not improved:
            step *= 0.5
    return Schedule.from_times(x, total_time), best
