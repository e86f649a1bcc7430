import pytest

from ciprio.core import CiCycle, Schedule, TestCaseRecord

TestCaseRecord.__test__ = False  # keep pytest from collecting the dataclass


def make_cycle(specs, index=0):
    """specs: list of (test, duration, status) tuples."""
    records = tuple(
        TestCaseRecord(test, duration, status, index) for test, duration, status in specs
    )
    return CiCycle(index, records)


def full_schedule(cycle):
    return Schedule(cycle.tests, total_pool_size=len(cycle.records))


@pytest.fixture
def abc_cycle():
    return make_cycle([("A", 1.0, 0), ("B", 2.0, 1), ("C", 3.0, 0)])
