"""Replay orchestration: per-cycle loop, multi-iteration averaging,
trend fitting and agent comparison."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .agents import AGENT_NAMES, AgentConfig, create_agent
from .dataset_io import Dataset
from .evaluation import (
    NapfdSeries,
    TrendLine,
    build_schedule,
    grouped_difference,
    napfd,
    trend_fit,
)
from .rewards import REWARDS, get_reward_function


@dataclass(frozen=True)
class ExperimentConfig:
    agent: str = "network"
    reward: str = "tcfail"
    budget_ratio: float = 0.5
    iterations: int = 30
    seed: int = 0
    agent_config: AgentConfig = field(default_factory=AgentConfig)

    def __post_init__(self):
        if self.agent not in AGENT_NAMES:
            raise KeyError(f"unknown agent {self.agent!r}; choose from {AGENT_NAMES}")
        if self.reward not in REWARDS:
            raise KeyError(
                f"unknown reward {self.reward!r}; choose from {sorted(REWARDS)}"
            )
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (0.0 < self.budget_ratio <= 1.0):
            raise ValueError("budget_ratio must be in (0, 1]")


@dataclass(frozen=True)
class CycleOutcome:
    cycle: int
    napfd: float
    scheduled_count: int
    detected: int
    total_failures: int


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    per_iteration: tuple[tuple[CycleOutcome, ...], ...]
    mean_series: NapfdSeries
    trend: TrendLine

    def iteration_series(self, k: int) -> NapfdSeries:
        outcomes = self.per_iteration[k]
        return NapfdSeries(
            tuple(o.cycle for o in outcomes), tuple(o.napfd for o in outcomes)
        )


def run_replay(dataset: Dataset, config: ExperimentConfig, seed: int) -> tuple[CycleOutcome, ...]:
    """One pass over the dataset's cycles with a fresh agent."""
    agent_cfg = replace(
        config.agent_config,
        seed=seed,
        reward=config.reward,
        approximator=config.agent
        if config.agent in ("network", "tree")
        else config.agent_config.approximator,
    )
    agent = create_agent(config.agent, agent_cfg)
    reward_fn = get_reward_function(config.reward)

    outcomes = []
    for cycle in dataset.cycles:
        priorities = agent.prioritize(cycle)
        schedule = build_schedule(priorities, cycle, config.budget_ratio)
        total_failures = cycle.failure_count()
        score = napfd(schedule, cycle, total_failures)
        detected = sum(
            1
            for rec in cycle.records
            if rec.status == 0 and rec.test in set(schedule.ordered_tests)
        )
        rewards = reward_fn(cycle, schedule)
        agent.observe_and_learn(cycle, schedule, rewards)
        outcomes.append(
            CycleOutcome(cycle.index, score, len(schedule), detected, total_failures)
        )
    return tuple(outcomes)


def run_experiment(dataset: Dataset, config: ExperimentConfig) -> ExperimentResult:
    """Replay the dataset ``iterations`` times (seed + k per iteration) and
    average the per-cycle scores."""
    per_iteration = tuple(
        run_replay(dataset, config, seed=config.seed + k)
        for k in range(config.iterations)
    )
    cycles = tuple(o.cycle for o in per_iteration[0])
    matrix = np.array([[o.napfd for o in it] for it in per_iteration])
    mean_series = NapfdSeries(cycles, tuple(float(v) for v in matrix.mean(axis=0)))
    return ExperimentResult(config, per_iteration, mean_series, trend_fit(mean_series))


@dataclass(frozen=True)
class ComparisonResult:
    baseline: ExperimentResult
    retecs: ExperimentResult
    group_size: int
    differences: tuple[tuple[int, float], ...]


def compare(
    dataset: Dataset,
    baseline_config: ExperimentConfig,
    retecs_config: ExperimentConfig,
    group_size: int = 30,
) -> ComparisonResult:
    """Run both experiments on the same dataset and report grouped mean
    differences (positive means the baseline did better)."""
    if baseline_config.budget_ratio != retecs_config.budget_ratio:
        raise ValueError("compared experiments must share the budget ratio")
    baseline = run_experiment(dataset, baseline_config)
    retecs = run_experiment(dataset, retecs_config)
    diffs = grouped_difference(baseline.mean_series, retecs.mean_series, group_size)
    return ComparisonResult(baseline, retecs, group_size, tuple(diffs))
