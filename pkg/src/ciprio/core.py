"""Core domain model: test pools, CI cycles, schedules and agent state encoding.

A test is identified by an opaque string token. Each CI cycle holds one
execution record per test that ran in it. A schedule is the ordered,
possibly truncated suite chosen for a cycle; ranks are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class DatasetIntegrityError(ValueError):
    """Raised when records contradict the dataset invariants."""


@dataclass(frozen=True)
class TestCaseRecord:
    """One execution of one test in one CI cycle.

    ``status`` follows the internal convention: 1 = passed, 0 = failed.
    """

    test: str
    duration: float
    status: int
    cycle_index: int

    def __post_init__(self):
        if not self.test:
            raise ValueError("test id must be non-empty")
        if self.duration < 0:
            raise DatasetIntegrityError(
                f"negative duration {self.duration} for test {self.test!r}"
            )
        if self.status not in (0, 1):
            raise ValueError(f"status must be 0 or 1, got {self.status!r}")
        if self.cycle_index < 0:
            raise ValueError("cycle_index must be non-negative")


@dataclass(frozen=True)
class CiCycle:
    """All execution records belonging to one commit."""

    index: int
    records: tuple[TestCaseRecord, ...]

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.cycle_index != self.index:
                raise DatasetIntegrityError(
                    f"record for {rec.test!r} carries cycle {rec.cycle_index}, "
                    f"expected {self.index}"
                )
            if rec.test in seen:
                raise DatasetIntegrityError(
                    f"duplicate test {rec.test!r} in cycle {self.index}"
                )
            seen.add(rec.test)

    @property
    def tests(self) -> tuple[str, ...]:
        return tuple(rec.test for rec in self.records)

    def record_for(self, test: str) -> TestCaseRecord:
        for rec in self.records:
            if rec.test == test:
                return rec
        raise DatasetIntegrityError(f"no record for test {test!r} in cycle {self.index}")

    def status_map(self) -> dict[str, int]:
        return {rec.test: rec.status for rec in self.records}

    def total_duration(self) -> float:
        return sum(rec.duration for rec in self.records)

    def failure_count(self) -> int:
        return sum(1 for rec in self.records if rec.status == 0)


@dataclass(frozen=True)
class Schedule:
    """Ordered, budget-truncated suite for one cycle. Position k has rank k (1-based)."""

    ordered_tests: tuple[str, ...]
    total_pool_size: int

    def __post_init__(self):
        if len(set(self.ordered_tests)) != len(self.ordered_tests):
            raise ValueError("schedule contains duplicate tests")
        if len(self.ordered_tests) > self.total_pool_size:
            raise ValueError("schedule longer than the cycle's test pool")

    def __len__(self) -> int:
        return len(self.ordered_tests)


def rank_of(schedule: Schedule, test: str) -> Optional[int]:
    """1-based rank of ``test`` in the schedule, or None if it was not selected."""
    try:
        return schedule.ordered_tests.index(test) + 1
    except ValueError:
        return None


def failed_subset(cycle: CiCycle, schedule: Schedule) -> set[str]:
    """Scheduled tests whose record in the cycle failed (status 0)."""
    statuses = cycle.status_map()
    out = set()
    for test in schedule.ordered_tests:
        if test not in statuses:
            raise DatasetIntegrityError(
                f"scheduled test {test!r} has no record in cycle {cycle.index}"
            )
        if statuses[test] == 0:
            out.add(test)
    return out


@dataclass(frozen=True)
class FeatureVector:
    """Agent-facing state for one test.

    ``failure_history`` uses 1 = failed (complement of record status),
    most recent first, zero-padded at the tail.
    """

    normalized_duration: float
    recency: float
    failure_history: tuple[float, ...]

    def as_list(self) -> list[float]:
        return [self.normalized_duration, self.recency, *self.failure_history]


def state_vector(
    pending_duration: float,
    current_cycle_index: int,
    past_results: Sequence[tuple[int, int]],
    history_length: int,
    max_duration: float,
) -> FeatureVector:
    """Encode one test's state ahead of scheduling.

    ``past_results`` is the test's execution log as (cycle_index, status)
    pairs sorted most-recent-first; ``pending_duration`` is the duration of
    the upcoming execution, known before running.
    """
    if history_length < 1:
        raise ValueError("history_length must be >= 1")
    if max_duration <= 0:
        raise ValueError("max_duration must be positive")

    norm_dur = min(1.0, max(0.0, pending_duration / max_duration))

    if past_results:
        delta = current_cycle_index - past_results[0][0]
    else:
        delta = current_cycle_index
    recency = 1.0 / (1.0 + delta)

    fails = [1.0 - status for _, status in past_results[:history_length]]
    fails.extend([0.0] * (history_length - len(fails)))
    return FeatureVector(norm_dur, recency, tuple(fails))


class ExecutionHistory:
    """Per-test execution log, most recent first, shared by agents and baselines."""

    def __init__(self):
        self._log: dict[str, list[tuple[int, int]]] = {}
        self.max_duration: float = 0.0

    def results_for(self, test: str) -> list[tuple[int, int]]:
        return self._log.get(test, [])

    def observe_durations(self, cycle: CiCycle) -> None:
        """Register pending durations (known before execution) for normalization."""
        for rec in cycle.records:
            if rec.duration > self.max_duration:
                self.max_duration = rec.duration

    def record_cycle(self, cycle: CiCycle) -> None:
        """Append the cycle's verdicts after execution."""
        for rec in cycle.records:
            self._log.setdefault(rec.test, []).insert(0, (rec.cycle_index, rec.status))
