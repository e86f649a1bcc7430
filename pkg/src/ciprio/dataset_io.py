"""Dataset ingestion, statistics and the synthetic CI-history generator.

Input logs use verdict 1 = failed; internal records use status 1 = passed.
That conversion happens here and nowhere else.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .core import CiCycle, DatasetIntegrityError, TestCaseRecord


class ParseError(ValueError):
    """Malformed input log; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Dataset:
    name: str
    cycles: tuple[CiCycle, ...]
    test_pool: frozenset[str]

    def __post_init__(self):
        for i, cycle in enumerate(self.cycles):
            if cycle.index != i:
                raise DatasetIntegrityError(
                    f"cycle indices must be contiguous from 0; found {cycle.index} at {i}"
                )
            for rec in cycle.records:
                if rec.test not in self.test_pool:
                    raise DatasetIntegrityError(f"test {rec.test!r} not in pool")


@dataclass(frozen=True)
class DatasetStats:
    distinct_tests: int
    commit_count: int
    execution_count: int
    failed_fraction: float


@dataclass(frozen=True)
class SynthConfig:
    test_count: int = 100
    cycle_count: int = 300
    always_fail_fraction: float = 0.2
    noise_flip_probability: float = 0.0
    duration_min: float = 0.5
    duration_max: float = 1.5
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.always_fail_fraction <= 1.0):
            raise ValueError("always_fail_fraction must be in [0, 1]")
        if not (0.0 <= self.noise_flip_probability <= 1.0):
            raise ValueError("noise_flip_probability must be in [0, 1]")
        if self.duration_min < 0 or self.duration_max < self.duration_min:
            raise ValueError("invalid duration bounds")


def _build_dataset(name: str, rows: list[tuple[int, str, float, int]]) -> Dataset:
    """Assemble records grouped by original cycle id, re-indexed to 0-based."""
    by_cycle: dict[int, list[tuple[str, float, int]]] = {}
    for cycle_id, test, duration, status in rows:
        by_cycle.setdefault(cycle_id, []).append((test, duration, status))

    cycles = []
    pool = set()
    for new_index, cycle_id in enumerate(sorted(by_cycle)):
        records = []
        seen = set()
        for test, duration, status in by_cycle[cycle_id]:
            if test in seen:
                raise DatasetIntegrityError(
                    f"duplicate record for test {test!r} in cycle {cycle_id}"
                )
            seen.add(test)
            pool.add(test)
            records.append(TestCaseRecord(test, duration, status, new_index))
        cycles.append(CiCycle(new_index, tuple(records)))
    return Dataset(name, tuple(cycles), frozenset(pool))


def _parse_canonical(text: str, name: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, expected a header row", line=1)
    if [h.strip() for h in header] != ["cycle", "test_id", "duration", "verdict"]:
        raise ParseError(f"unexpected header {header!r}", line=1)

    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line=lineno)
        try:
            cycle_id = int(row[0])
            duration = float(row[2])
            verdict = int(row[3])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        test = row[1].strip()
        if not test:
            raise ParseError("empty test id", line=lineno)
        if verdict not in (0, 1):
            raise ParseError(f"verdict must be 0 or 1, got {verdict}", line=lineno)
        if duration < 0:
            raise DatasetIntegrityError(f"line {lineno}: negative duration {duration}")
        rows.append((cycle_id, test, duration, 1 - verdict))
    return _build_dataset(name, rows)


def _parse_abb(text: str, name: str) -> Dataset:
    """Semicolon-separated ABB robotics export. Tests are identified by Name
    when present (Id is unique per row in those files), otherwise by Id."""
    reader = csv.DictReader(io.StringIO(text), delimiter=";")
    if reader.fieldnames is None:
        raise ParseError("empty input, expected a header row", line=1)
    fields = set(reader.fieldnames)
    required = {"Id", "Duration", "Verdict", "Cycle"}
    if not required <= fields:
        raise ParseError(
            f"missing columns {sorted(required - fields)}", line=1
        )
    id_column = "Name" if "Name" in fields else "Id"

    rows = []
    for lineno, row in enumerate(reader, start=2):
        try:
            cycle_id = int(row["Cycle"])
            duration = float(row["Duration"])
            verdict = int(row["Verdict"])
        except (TypeError, ValueError) as exc:
            raise ParseError(str(exc), line=lineno) from None
        test = (row[id_column] or "").strip()
        if not test:
            raise ParseError("empty test id", line=lineno)
        if verdict not in (0, 1):
            raise ParseError(f"verdict must be 0 or 1, got {verdict}", line=lineno)
        if duration < 0:
            raise DatasetIntegrityError(f"line {lineno}: negative duration {duration}")
        rows.append((cycle_id, test, duration, 1 - verdict))
    return _build_dataset(name, rows)


def parse_ci_log(source, format: str = "canonical", name: str = "dataset") -> Dataset:
    """Parse a CI history from a path, file object or string.

    ``format`` is ``canonical`` (comma-separated cycle,test_id,duration,verdict)
    or ``abb`` (semicolon-separated robotics export).
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source  # inline log content
    else:
        with open(source, "rb") as fh:
            text = fh.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    if format == "canonical":
        return _parse_canonical(text, name)
    if format == "abb":
        return _parse_abb(text, name)
    raise ValueError(f"unknown format {format!r}")


def serialize_canonical(dataset: Dataset) -> str:
    """Write the canonical CSV form (verdict 1 = failed)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["cycle", "test_id", "duration", "verdict"])
    for cycle in dataset.cycles:
        for rec in cycle.records:
            writer.writerow([cycle.index, rec.test, repr(rec.duration), 1 - rec.status])
    return out.getvalue()


def dataset_stats(dataset: Dataset) -> DatasetStats:
    executions = sum(len(c.records) for c in dataset.cycles)
    failed = sum(c.failure_count() for c in dataset.cycles)
    return DatasetStats(
        distinct_tests=len(dataset.test_pool),
        commit_count=len(dataset.cycles),
        execution_count=executions,
        failed_fraction=failed / executions if executions else 0.0,
    )


def synth_generate(config: SynthConfig) -> Dataset:
    """Deterministic synthetic history: a fixed seeded subset of tests fails
    every cycle, every verdict is independently flipped with the configured
    probability, durations are uniform in the configured bounds."""
    rng = np.random.default_rng(config.seed)
    n = config.test_count
    width = max(3, len(str(max(n - 1, 0))))
    tests = [f"T{i:0{width}d}" for i in range(n)]
    k = math.ceil(config.always_fail_fraction * n)
    always_fail = set(rng.permutation(n)[:k].tolist())

    cycles = []
    for c in range(config.cycle_count):
        durations = rng.uniform(config.duration_min, config.duration_max, size=n)
        flips = rng.random(n) < config.noise_flip_probability
        records = []
        for i, test in enumerate(tests):
            fails = (i in always_fail) ^ bool(flips[i])
            records.append(TestCaseRecord(test, float(durations[i]), 0 if fails else 1, c))
        cycles.append(CiCycle(c, tuple(records)))
    return Dataset(
        f"synth-{config.seed}", tuple(cycles), frozenset(tests)
    )
