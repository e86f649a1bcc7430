"""Prioritization agents: the RL loop (prioritize, schedule, reward, learn)
and the three traditional baselines (random, sorting, weighting).

Every agent exposes ``prioritize`` and ``observe_and_learn``; the replay
driver calls them once per cycle, in that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .approximators import (
    DecisionTreeModel,
    Experience,
    MlpRegressor,
    ReplayBuffer,
    fit_neural,
    fit_tree,
)
from .core import CiCycle, ExecutionHistory, Schedule, state_vector


@dataclass
class AgentConfig:
    history_length: int = 4
    reward: str = "tcfail"
    approximator: str = "network"
    exploration_std: float = 0.3
    exploration_decay: float = 0.995
    seed: int = 0
    hidden_sizes: tuple[int, ...] = (32,)
    learning_rate: float = 0.05
    batch_size: int = 1000
    buffer_capacity: int = 10000
    epochs: int = 1
    tree_criterion: str = "gini"
    tree_max_depth: int = 20
    tree_min_samples_split: int = 3

    def __post_init__(self):
        if self.history_length < 1:
            raise ValueError("history_length must be >= 1")
        if not (0.0 < self.exploration_decay <= 1.0):
            raise ValueError("exploration_decay must be in (0, 1]")
        if self.exploration_std < 0:
            raise ValueError("exploration_std must be non-negative")


class Agent:
    """Shared bookkeeping: execution history and duration normalization."""

    name = "base"

    def __init__(self):
        self.history = ExecutionHistory()

    def _pool_states(self, cycle: CiCycle, history_length: int) -> np.ndarray:
        max_dur = self.history.max_duration or 1.0
        rows = [
            state_vector(
                rec.duration,
                cycle.index,
                self.history.results_for(rec.test),
                history_length,
                max_dur,
            ).as_list()
            for rec in cycle.records
        ]
        return np.array(rows, dtype=float)

    def prioritize(self, cycle: CiCycle) -> dict[str, float]:
        raise NotImplementedError

    def observe_and_learn(
        self, cycle: CiCycle, schedule: Schedule, rewards: dict[str, float]
    ) -> None:
        self.history.record_cycle(cycle)


class RlAgent(Agent):
    """Value-function agent: predicted state value plus decaying exploration noise."""

    def __init__(self, config: AgentConfig):
        super().__init__()
        if config.approximator not in ("network", "tree"):
            raise ValueError(f"unknown approximator {config.approximator!r}")
        self.config = config
        self.name = config.approximator
        self.rng = np.random.default_rng(config.seed)
        self.noise_std = config.exploration_std
        self.buffer = ReplayBuffer(config.buffer_capacity)
        self.input_dim = 2 + config.history_length
        if config.approximator == "network":
            self.model = MlpRegressor(
                self.input_dim, config.hidden_sizes, seed=config.seed
            )
        else:
            self.model: DecisionTreeModel | None = None  # fitted on first batch

    def _predict(self, states: np.ndarray) -> np.ndarray:
        if self.model is None:
            return np.zeros(states.shape[0])
        return np.atleast_1d(self.model.predict(states))

    def prioritize(self, cycle: CiCycle) -> dict[str, float]:
        self.history.observe_durations(cycle)
        states = self._pool_states(cycle, self.config.history_length)
        priorities = self._predict(states)
        if self.noise_std > 0:
            priorities = priorities + self.rng.normal(
                0.0, self.noise_std, size=len(priorities)
            )
        self.noise_std *= self.config.exploration_decay
        return {rec.test: float(p) for rec, p in zip(cycle.records, priorities)}

    def observe_and_learn(
        self, cycle: CiCycle, schedule: Schedule, rewards: dict[str, float]
    ) -> None:
        scheduled = set(schedule.ordered_tests)
        max_dur = self.history.max_duration or 1.0
        for rec in cycle.records:
            if rec.test not in scheduled:
                continue
            state = state_vector(
                rec.duration,
                cycle.index,
                self.history.results_for(rec.test),
                self.config.history_length,
                max_dur,
            )
            self.buffer.add(Experience(tuple(state.as_list()), rewards[rec.test]))

        batch = self.buffer.sample(self.config.batch_size, self.rng)
        if batch:
            if self.config.approximator == "network":
                fit_neural(
                    self.model,
                    batch,
                    learning_rate=self.config.learning_rate,
                    epochs=self.config.epochs,
                )
            else:
                self.model = fit_tree(
                    batch,
                    criterion=self.config.tree_criterion,
                    max_depth=self.config.tree_max_depth,
                    min_samples_split=self.config.tree_min_samples_split,
                )
        self.history.record_cycle(cycle)


class RandomAgent(Agent):
    """Uniform random priorities in [0, 1)."""

    name = "random"

    def __init__(self, seed: int = 0):
        super().__init__()
        self.rng = np.random.default_rng(seed)

    def prioritize(self, cycle: CiCycle) -> dict[str, float]:
        self.history.observe_durations(cycle)
        values = self.rng.random(len(cycle.records))
        return {rec.test: float(v) for rec, v in zip(cycle.records, values)}


class SortingAgent(Agent):
    """Priority 1 if the most recent verdict failed; never-run tests get 1."""

    name = "sorting"

    def prioritize(self, cycle: CiCycle) -> dict[str, float]:
        self.history.observe_durations(cycle)
        out = {}
        for rec in cycle.records:
            past = self.history.results_for(rec.test)
            out[rec.test] = 1.0 if not past or past[0][1] == 0 else 0.0
        return out


class WeightingAgent(Agent):
    """Equal-weight mean of failure rate, recency and normalized duration."""

    name = "weighting"

    def __init__(self, history_length: int = 4):
        super().__init__()
        if history_length < 1:
            raise ValueError("history_length must be >= 1")
        self.history_length = history_length

    def prioritize(self, cycle: CiCycle) -> dict[str, float]:
        self.history.observe_durations(cycle)
        max_dur = self.history.max_duration or 1.0
        out = {}
        for rec in cycle.records:
            past = self.history.results_for(rec.test)
            window = past[: self.history_length]
            fail_rate = (
                sum(1 - status for _, status in window) / len(window) if window else 0.0
            )
            state = state_vector(rec.duration, cycle.index, past, 1, max_dur)
            out[rec.test] = (fail_rate + state.recency + state.normalized_duration) / 3.0
        return out


def baseline_random(cycle: CiCycle, seed: int = 0) -> dict[str, float]:
    return RandomAgent(seed).prioritize(cycle)


AGENT_NAMES = ("network", "tree", "random", "sorting", "weighting")


def create_agent(name: str, config: AgentConfig) -> Agent:
    if name in ("network", "tree"):
        cfg = config
        if cfg.approximator != name:
            cfg = AgentConfig(**{**config.__dict__, "approximator": name})
        return RlAgent(cfg)
    if name == "random":
        return RandomAgent(config.seed)
    if name == "sorting":
        return SortingAgent()
    if name == "weighting":
        return WeightingAgent(config.history_length)
    raise KeyError(f"unknown agent {name!r}; choose from {AGENT_NAMES}")
