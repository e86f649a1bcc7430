"""Budgeted schedule construction and evaluation math: NAPFD, trend
fitting and grouped baseline differences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CiCycle, Schedule, failed_subset, rank_of


@dataclass(frozen=True)
class NapfdSeries:
    """Per-cycle fault-detection scores, cycle indices strictly increasing."""

    cycles: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.cycles) != len(self.values):
            raise ValueError("cycles and values must have equal length")
        if any(b <= a for a, b in zip(self.cycles, self.cycles[1:])):
            raise ValueError("cycle indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.cycles)


@dataclass(frozen=True)
class TrendLine:
    slope: float
    intercept: float


def build_schedule(
    priorities: dict[str, float], cycle: CiCycle, budget_ratio: float
) -> Schedule:
    """Order the pool by descending priority (ties by test id) and keep the
    greedy prefix whose cumulative duration stays within the budget."""
    if not (0.0 < budget_ratio <= 1.0):
        raise ValueError("budget_ratio must be in (0, 1]")
    missing = [rec.test for rec in cycle.records if rec.test not in priorities]
    if missing:
        raise KeyError(f"priorities missing for tests {missing[:5]}")

    ordered = sorted(cycle.records, key=lambda rec: (-priorities[rec.test], rec.test))
    budget = budget_ratio * cycle.total_duration()
    taken = []
    spent = 0.0
    for rec in ordered:
        if spent + rec.duration > budget:
            break
        taken.append(rec.test)
        spent += rec.duration
    return Schedule(tuple(taken), total_pool_size=len(cycle.records))


def napfd(schedule: Schedule, cycle: CiCycle, total_failures_in_pool: int) -> float:
    """Rank-weighted fraction of pool failures detected by the schedule.

    Defined as 1.0 when the pool has no failures and 0.0 when failures
    exist but none are detected; floored at 0 (heavy truncation can push
    the raw formula below zero).
    """
    if total_failures_in_pool == 0:
        return 1.0
    detected = failed_subset(cycle, schedule)
    if total_failures_in_pool < len(detected):
        raise ValueError("total_failures_in_pool below detected failure count")
    if not detected:
        return 0.0
    n = len(schedule)
    p = len(detected) / total_failures_in_pool
    rank_sum = sum(rank_of(schedule, t) for t in detected)
    value = p - rank_sum / (len(detected) * n) + p / (2 * n)
    return max(0.0, value)


def trend_fit(series: NapfdSeries) -> TrendLine:
    """Ordinary least-squares line through (cycle, value)."""
    if len(series) < 2:
        raise ValueError("trend fit needs at least 2 points")
    slope, intercept = np.polyfit(series.cycles, series.values, deg=1)
    return TrendLine(float(slope), float(intercept))


def grouped_difference(
    baseline: NapfdSeries, retecs: NapfdSeries, group_size: int = 30
) -> list[tuple[int, float]]:
    """Per consecutive group of cycles, mean(baseline) - mean(retecs);
    a trailing partial group keeps its actual size."""
    if group_size < 1:
        raise ValueError("group_size must be positive")
    if baseline.cycles != retecs.cycles:
        raise ValueError("series are not aligned on the same cycles")
    diffs = []
    b = np.asarray(baseline.values)
    r = np.asarray(retecs.values)
    for g, start in enumerate(range(0, len(b), group_size)):
        stop = start + group_size
        diffs.append((g, float(np.mean(b[start:stop]) - np.mean(r[start:stop]))))
    return diffs
