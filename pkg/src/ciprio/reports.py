"""Result files and plots emitted by the CLI.

Everything except the timestamp line in meta.txt is a pure function of
the experiment output, so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import csv
import io
import os
from datetime import datetime, timezone

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiment import ComparisonResult, ExperimentConfig, ExperimentResult


def results_csv(result: ExperimentResult) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        [
            "agent",
            "reward",
            "iteration",
            "cycle",
            "napfd",
            "scheduled_count",
            "detected",
            "total_failures",
        ]
    )
    cfg = result.config
    for k, outcomes in enumerate(result.per_iteration):
        for o in outcomes:
            writer.writerow(
                [
                    cfg.agent,
                    cfg.reward,
                    k,
                    o.cycle,
                    repr(o.napfd),
                    o.scheduled_count,
                    o.detected,
                    o.total_failures,
                ]
            )
    return out.getvalue()


def trend_csv(result: ExperimentResult) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["slope", "intercept"])
    writer.writerow([repr(result.trend.slope), repr(result.trend.intercept)])
    return out.getvalue()


def diff_csv(comparison: ComparisonResult) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["group_index", "mean_difference"])
    for g, d in comparison.differences:
        writer.writerow([g, repr(d)])
    return out.getvalue()


def meta_text(config: ExperimentConfig, dataset_name: str) -> str:
    lines = [f"# generated {datetime.now(timezone.utc).isoformat()}"]
    lines.append(f"dataset={dataset_name}")
    lines.append(f"agent={config.agent}")
    lines.append(f"reward={config.reward}")
    lines.append(f"budget_ratio={config.budget_ratio}")
    lines.append(f"iterations={config.iterations}")
    lines.append(f"seed={config.seed}")
    lines.append(
        "iteration_seeds="
        + ",".join(str(config.seed + k) for k in range(config.iterations))
    )
    ac = config.agent_config
    lines.append(f"history_length={ac.history_length}")
    lines.append(f"exploration_std={ac.exploration_std}")
    lines.append(f"exploration_decay={ac.exploration_decay}")
    lines.append(f"hidden_sizes={','.join(map(str, ac.hidden_sizes))}")
    lines.append(f"learning_rate={ac.learning_rate}")
    return "\n".join(lines) + "\n"


def _save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def napfd_plot(result: ExperimentResult, path) -> None:
    """Per-cycle mean score with the fitted trend overlaid."""
    fig, ax = plt.subplots(figsize=(8, 4))
    cycles = result.mean_series.cycles
    ax.plot(cycles, result.mean_series.values, lw=0.8, label="mean NAPFD")
    trend = [result.trend.intercept + result.trend.slope * c for c in cycles]
    ax.plot(cycles, trend, "r-", label=f"trend (slope {result.trend.slope:.2e})")
    ax.set_xlabel("CI cycle")
    ax.set_ylabel("NAPFD")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="lower right")
    ax.set_title(f"{result.config.agent} / {result.config.reward}")
    fig.tight_layout()
    _save_svg(fig, path)


def diff_plot(comparison: ComparisonResult, path) -> None:
    """Grouped mean differences; positive bars favor the baseline."""
    fig, ax = plt.subplots(figsize=(8, 4))
    groups = [g for g, _ in comparison.differences]
    values = [d for _, d in comparison.differences]
    ax.bar(groups, values)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel(f"cycle group (size {comparison.group_size})")
    ax.set_ylabel("baseline - retecs mean NAPFD")
    ax.set_title(
        f"{comparison.baseline.config.agent} vs {comparison.retecs.config.agent}"
    )
    fig.tight_layout()
    _save_svg(fig, path)


def write_run_outputs(outdir, result: ExperimentResult, dataset_name: str) -> None:
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "results.csv"), "w") as fh:
        fh.write(results_csv(result))
    with open(os.path.join(outdir, "trend.csv"), "w") as fh:
        fh.write(trend_csv(result))
    with open(os.path.join(outdir, "meta.txt"), "w") as fh:
        fh.write(meta_text(result.config, dataset_name))
    napfd_plot(result, os.path.join(outdir, "napfd.svg"))


def write_compare_outputs(outdir, comparison: ComparisonResult, dataset_name: str) -> None:
    write_run_outputs(outdir, comparison.retecs, dataset_name)
    baseline_name = comparison.baseline.config.agent
    with open(os.path.join(outdir, f"diff_{baseline_name}.csv"), "w") as fh:
        fh.write(diff_csv(comparison))
    diff_plot(comparison, os.path.join(outdir, "diff.svg"))
