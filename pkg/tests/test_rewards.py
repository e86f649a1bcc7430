import random

import pytest

from ciprio.core import Schedule
from ciprio.rewards import (
    get_reward_function,
    reward_failure_count,
    reward_test_case_failure,
    reward_time_ranked,
)

from conftest import full_schedule, make_cycle


def brute_force_failure_count(cycle, schedule):
    """Independent reimplementation straight from the definitions."""
    statuses = cycle.status_map()
    scheduled = list(schedule.ordered_tests)
    n_failed = sum(1 for t in scheduled if statuses[t] == 0)
    return {
        rec.test: float(n_failed) if rec.test in scheduled else 0.0
        for rec in cycle.records
    }


def brute_force_tcfail(cycle, schedule):
    statuses = cycle.status_map()
    scheduled = list(schedule.ordered_tests)
    return {
        rec.test: float(1 - statuses[rec.test]) if rec.test in scheduled else 0.0
        for rec in cycle.records
    }


def brute_force_time_ranked(cycle, schedule):
    statuses = cycle.status_map()
    scheduled = list(schedule.ordered_tests)
    failed = [t for t in scheduled if statuses[t] == 0]
    out = {}
    for rec in cycle.records:
        if rec.test not in scheduled:
            out[rec.test] = 0.0
            continue
        rank_t = scheduled.index(rec.test) + 1
        later_failures = sum(
            1 for tk in failed if rank_t < scheduled.index(tk) + 1
        )
        out[rec.test] = float(len(failed)) - statuses[rec.test] * later_failures
    return out


def random_instance(rng, max_tests=8):
    n = rng.randint(1, max_tests)
    specs = [(f"t{i}", rng.uniform(0, 5), rng.randint(0, 1)) for i in range(n)]
    cycle = make_cycle(specs)
    k = rng.randint(0, n)
    tests = rng.sample([s[0] for s in specs], k)
    return cycle, Schedule(tuple(tests), n)


class TestFailureCount:
    def test_scheduled_share_the_failure_count(self):
        cycle = make_cycle(
            [("A", 1, 0), ("B", 1, 0), ("C", 1, 0), ("D", 1, 1), ("E", 1, 1), ("F", 1, 0)]
        )
        sched = Schedule(("A", "B", "C", "D", "E"), 6)
        rewards = reward_failure_count(cycle, sched)
        assert all(rewards[t] == 3.0 for t in sched.ordered_tests)
        assert rewards["F"] == 0.0

    def test_no_failures_means_zero_everywhere(self):
        cycle = make_cycle([("A", 1, 1), ("B", 1, 1)])
        assert set(reward_failure_count(cycle, full_schedule(cycle)).values()) == {0.0}

    def test_single_scheduled_failure(self):
        cycle = make_cycle([("A", 1, 0), ("B", 1, 1)])
        assert reward_failure_count(cycle, Schedule(("A",), 2))["A"] == 1.0


class TestTestCaseFailure:
    def test_scheduled_failure_gets_one(self, abc_cycle):
        assert reward_test_case_failure(abc_cycle, full_schedule(abc_cycle))["A"] == 1.0

    def test_scheduled_pass_gets_zero(self, abc_cycle):
        assert reward_test_case_failure(abc_cycle, full_schedule(abc_cycle))["B"] == 0.0

    def test_unscheduled_gets_zero(self, abc_cycle):
        rewards = reward_test_case_failure(abc_cycle, Schedule(("B",), 3))
        assert rewards["A"] == 0.0 and rewards["C"] == 0.0

    def test_sums_to_scheduled_failure_count(self):
        cycle = make_cycle([("A", 1, 0), ("B", 1, 0), ("C", 1, 1)])
        sched = full_schedule(cycle)
        assert sum(reward_test_case_failure(cycle, sched).values()) == 2.0


class TestTimeRanked:
    def test_hand_worked_schedule(self):
        cycle = make_cycle([("t1", 1, 1), ("t2", 1, 0), ("t3", 1, 0), ("t4", 1, 1)])
        rewards = reward_time_ranked(cycle, Schedule(("t1", "t2", "t3", "t4"), 4))
        assert rewards == {"t1": 0.0, "t2": 2.0, "t3": 2.0, "t4": 2.0}

    def test_all_passing_gives_zero(self):
        cycle = make_cycle([("A", 1, 1), ("B", 1, 1)])
        assert set(reward_time_ranked(cycle, full_schedule(cycle)).values()) == {0.0}

    def test_single_scheduled_failure(self):
        cycle = make_cycle([("A", 1, 0), ("B", 1, 1)])
        assert reward_time_ranked(cycle, Schedule(("A",), 2))["A"] == 1.0

    def test_failed_tests_always_receive_full_count(self):
        rng = random.Random(7)
        for _ in range(50):
            cycle, sched = random_instance(rng)
            failed = {
                t for t in sched.ordered_tests if cycle.status_map()[t] == 0
            }
            rewards = reward_time_ranked(cycle, sched)
            for t in failed:
                assert rewards[t] == float(len(failed))

    def test_failures_first_leaves_passes_unpenalized(self):
        cycle = make_cycle([("A", 1, 0), ("B", 1, 0), ("C", 1, 1), ("D", 1, 1)])
        rewards = reward_time_ranked(cycle, Schedule(("A", "B", "C", "D"), 4))
        assert rewards["C"] == 2.0 and rewards["D"] == 2.0


@pytest.mark.parametrize(
    "ours,oracle",
    [
        (reward_failure_count, brute_force_failure_count),
        (reward_test_case_failure, brute_force_tcfail),
        (reward_time_ranked, brute_force_time_ranked),
    ],
)
def test_matches_brute_force_on_random_instances(ours, oracle):
    rng = random.Random(42)
    for _ in range(1000):
        cycle, sched = random_instance(rng)
        assert ours(cycle, sched) == oracle(cycle, sched)


def test_rewards_are_never_negative():
    rng = random.Random(11)
    for _ in range(300):
        cycle, sched = random_instance(rng)
        for fn in (reward_failure_count, reward_test_case_failure, reward_time_ranked):
            assert all(v >= 0.0 for v in fn(cycle, sched).values())


def test_time_ranked_is_bounded_by_failure_count():
    rng = random.Random(13)
    for _ in range(300):
        cycle, sched = random_instance(rng)
        failed = sum(1 for t in sched.ordered_tests if cycle.status_map()[t] == 0)
        assert all(v <= failed for v in reward_time_ranked(cycle, sched).values())


def test_registry_lookup():
    assert get_reward_function("tcfail") is reward_test_case_failure
    with pytest.raises(KeyError):
        get_reward_function("nope")
