"""Command-line entry points: synth, stats, run, compare."""

from __future__ import annotations

import sys

import click

from .agents import AGENT_NAMES, AgentConfig
from .dataset_io import (
    SynthConfig,
    dataset_stats,
    parse_ci_log,
    serialize_canonical,
    synth_generate,
)
from .experiment import ExperimentConfig, compare as run_compare, run_experiment
from .reports import write_compare_outputs, write_run_outputs
from .rewards import REWARDS


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load_config_file(path) -> dict[str, str]:
    """key=value lines; blank lines and # comments ignored."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _build_configs(params: dict) -> ExperimentConfig:
    hidden = tuple(int(h) for h in str(params["hidden"]).split(",") if h)
    agent_config = AgentConfig(
        history_length=int(params["history_length"]),
        reward=params["reward"],
        exploration_std=float(params["noise_std"]),
        exploration_decay=float(params["noise_decay"]),
        seed=int(params["seed"]),
        hidden_sizes=hidden,
        learning_rate=float(params["learning_rate"]),
    )
    return ExperimentConfig(
        agent=params["agent"],
        reward=params["reward"],
        budget_ratio=float(params["budget"]),
        iterations=int(params["iterations"]),
        seed=int(params["seed"]),
        agent_config=agent_config,
    )


_RUN_OPTIONS = [
    click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True)),
    click.option("--format", "fmt", type=click.Choice(["canonical", "abb"]), default="canonical"),
    click.option("--reward", default="tcfail"),
    click.option("--history-length", "history_length", default=4, show_default=True),
    click.option("--budget", default=0.5, show_default=True),
    click.option("--iterations", default=30, show_default=True),
    click.option("--seed", default=0, show_default=True),
    click.option("--noise-std", "noise_std", default=0.3, show_default=True),
    click.option("--noise-decay", "noise_decay", default=0.995, show_default=True),
    click.option("--hidden", default="32", show_default=True, help="comma-separated layer widths"),
    click.option("--learning-rate", "learning_rate", default=0.05, show_default=True),
    click.option("--config", "config_file", type=click.Path(exists=True), default=None,
                 help="key=value file; command-line flags win"),
    click.option("--out", "outdir", required=True, type=click.Path()),
]


def _with_run_options(fn):
    for opt in reversed(_RUN_OPTIONS):
        fn = opt(fn)
    return fn


def _merge_config_file(params: dict, ctx: click.Context) -> dict:
    """File values fill in anything not set explicitly on the command line."""
    if not params.get("config_file"):
        return params
    file_values = _load_config_file(params["config_file"])
    merged = dict(params)
    for key, value in file_values.items():
        if key not in merged:
            raise ValueError(f"unknown config key {key!r}")
        if ctx.get_parameter_source(key) == click.core.ParameterSource.DEFAULT:
            merged[key] = value
    return merged


@click.group()
def main():
    """Learn and evaluate CI test prioritization strategies from history logs."""


@main.command()
@click.option("--tests", default=100, show_default=True)
@click.option("--cycles", default=300, show_default=True)
@click.option("--fail-fraction", default=0.2, show_default=True)
@click.option("--flip", default=0.0, show_default=True)
@click.option("--duration-min", default=0.5, show_default=True)
@click.option("--duration-max", default=1.5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "outpath", required=True, type=click.Path())
def synth(tests, cycles, fail_fraction, flip, duration_min, duration_max, seed, outpath):
    """Generate a synthetic CI history in the canonical CSV format."""
    try:
        dataset = synth_generate(
            SynthConfig(tests, cycles, fail_fraction, flip, duration_min, duration_max, seed)
        )
    except ValueError as exc:
        _fail(str(exc))
    with open(outpath, "w") as fh:
        fh.write(serialize_canonical(dataset))
    click.echo(f"wrote {outpath}")


@main.command()
@click.argument("dataset_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["canonical", "abb"]), default="canonical")
def stats(dataset_path, fmt):
    """Print dataset statistics as one delimiter-separated row."""
    try:
        dataset = parse_ci_log(dataset_path, format=fmt)
    except Exception as exc:
        _fail(str(exc))
    s = dataset_stats(dataset)
    click.echo("distinct_tests,commit_count,execution_count,failed_fraction")
    click.echo(f"{s.distinct_tests},{s.commit_count},{s.execution_count},{s.failed_fraction:.6f}")


@main.command()
@click.option("--agent", default="network", show_default=True)
@_with_run_options
@click.pass_context
def run(ctx, agent, **params):
    """Replay a dataset with one agent and write result files."""
    params["agent"] = agent
    try:
        params = _merge_config_file(params, ctx)
        config = _build_configs(params)
    except (KeyError, ValueError) as exc:
        _fail(str(exc))
    try:
        dataset = parse_ci_log(params["dataset_path"], format=params["fmt"])
    except Exception as exc:
        _fail(str(exc))
    result = run_experiment(dataset, config)
    write_run_outputs(params["outdir"], result, dataset.name)
    click.echo(
        f"agent={config.agent} reward={config.reward} "
        f"mean_napfd={sum(result.mean_series.values)/len(result.mean_series):.4f} "
        f"trend_slope={result.trend.slope:.3e}"
    )


@main.command()
@click.option("--agent", default="network", show_default=True)
@click.option("--baseline", default="random", show_default=True)
@click.option("--group-size", default=30, show_default=True)
@_with_run_options
@click.pass_context
def compare(ctx, agent, baseline, group_size, **params):
    """Run an agent and a baseline on the same dataset; report grouped differences."""
    params["agent"] = agent
    try:
        params = _merge_config_file(params, ctx)
        retecs_config = _build_configs(params)
        params_b = dict(params, agent=baseline)
        baseline_config = _build_configs(params_b)
    except (KeyError, ValueError) as exc:
        _fail(str(exc))
    try:
        dataset = parse_ci_log(params["dataset_path"], format=params["fmt"])
    except Exception as exc:
        _fail(str(exc))
    comparison = run_compare(dataset, baseline_config, retecs_config, group_size)
    write_compare_outputs(params["outdir"], comparison, dataset.name)
    click.echo(f"groups={len(comparison.differences)}")


if __name__ == "__main__":
    main()
