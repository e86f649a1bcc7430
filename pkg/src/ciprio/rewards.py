"""Per-test reward functions computed after a cycle's schedule has executed.

All three return one reward per test in the cycle's pool; unscheduled
tests get 0.
"""

from __future__ import annotations

from .core import CiCycle, Schedule, failed_subset


def reward_failure_count(cycle: CiCycle, schedule: Schedule) -> dict[str, float]:
    """Every scheduled test gets the number of scheduled failures."""
    n_failed = float(len(failed_subset(cycle, schedule)))
    scheduled = set(schedule.ordered_tests)
    return {
        rec.test: n_failed if rec.test in scheduled else 0.0 for rec in cycle.records
    }


def reward_test_case_failure(cycle: CiCycle, schedule: Schedule) -> dict[str, float]:
    """1 for a scheduled failure, 0 otherwise."""
    scheduled = set(schedule.ordered_tests)
    return {
        rec.test: float(1 - rec.status) if rec.test in scheduled else 0.0
        for rec in cycle.records
    }


def reward_time_ranked(cycle: CiCycle, schedule: Schedule) -> dict[str, float]:
    """Scheduled failures get the full failure count; scheduled passes are
    penalized by one for each failure ranked after them."""
    statuses = cycle.status_map()
    failed = failed_subset(cycle, schedule)
    n_failed = float(len(failed))

    rewards = {rec.test: 0.0 for rec in cycle.records}
    failures_after = 0  # failures ranked strictly after the current position
    for test in reversed(schedule.ordered_tests):
        rewards[test] = n_failed - statuses[test] * failures_after
        if test in failed:
            failures_after += 1
    return rewards


REWARDS = {
    "failcount": reward_failure_count,
    "tcfail": reward_test_case_failure,
    "timerank": reward_time_ranked,
}


def get_reward_function(name: str):
    try:
        return REWARDS[name]
    except KeyError:
        raise KeyError(
            f"unknown reward {name!r}; choose from {sorted(REWARDS)}"
        ) from None
