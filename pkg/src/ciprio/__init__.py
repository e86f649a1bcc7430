"""ciprio: reinforcement-learning test case prioritization over replayed CI logs."""

from .agents import AgentConfig, create_agent
from .core import CiCycle, FeatureVector, Schedule, TestCaseRecord
from .dataset_io import Dataset, SynthConfig, dataset_stats, parse_ci_log, synth_generate
from .evaluation import NapfdSeries, TrendLine, build_schedule, grouped_difference, napfd, trend_fit
from .experiment import ExperimentConfig, compare, run_experiment
from .rewards import REWARDS

__all__ = [
    "AgentConfig",
    "CiCycle",
    "Dataset",
    "ExperimentConfig",
    "FeatureVector",
    "NapfdSeries",
    "REWARDS",
    "Schedule",
    "SynthConfig",
    "TestCaseRecord",
    "TrendLine",
    "build_schedule",
    "compare",
    "create_agent",
    "dataset_stats",
    "grouped_difference",
    "napfd",
    "parse_ci_log",
    "run_experiment",
    "synth_generate",
    "trend_fit",
]

__version__ = "0.1.0"
