import io
import math

import pytest

from ciprio.core import DatasetIntegrityError
from ciprio.dataset_io import (
    ParseError,
    SynthConfig,
    dataset_stats,
    parse_ci_log,
    serialize_canonical,
    synth_generate,
)

CANONICAL = """cycle,test_id,duration,verdict
0,T1,2.5,1
0,T2,1.0,0
1,T1,2.0,0
1,T3,4.0,1
"""

ABB = """Id;Name;Duration;CalcPrio;LastRun;NumErrors;Verdict;Cycle
1;netA;2.5;0;2016-01-01;1;1;5
2;netB;1.0;0;2016-01-01;0;0;5
3;netA;2.0;0;2016-01-02;0;0;9
"""


class TestCanonicalParsing:
    def test_single_row_mapping(self):
        ds = parse_ci_log(io.StringIO(CANONICAL))
        rec = ds.cycles[0].record_for("T1")
        assert rec.duration == 2.5
        assert rec.status == 0  # verdict 1 = failed

    def test_empty_body_gives_empty_dataset(self):
        ds = parse_ci_log(io.StringIO("cycle,test_id,duration,verdict\n"))
        assert ds.cycles == ()
        assert dataset_stats(ds).execution_count == 0

    def test_duplicate_record_names_cycle_and_test(self):
        text = CANONICAL + "1,T3,1.0,0\n"
        with pytest.raises(DatasetIntegrityError, match="T3"):
            parse_ci_log(io.StringIO(text))

    def test_malformed_row_reports_line_number(self):
        text = "cycle,test_id,duration,verdict\n0,T1,notanumber,1\n"
        with pytest.raises(ParseError, match="line 2"):
            parse_ci_log(io.StringIO(text))

    def test_negative_duration_rejected(self):
        text = "cycle,test_id,duration,verdict\n0,T1,-1.0,1\n"
        with pytest.raises(DatasetIntegrityError):
            parse_ci_log(io.StringIO(text))

    def test_bad_header_rejected(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_ci_log(io.StringIO("a,b,c\n"))

    def test_cycles_reindexed_contiguously(self):
        text = "cycle,test_id,duration,verdict\n7,T1,1.0,0\n9,T1,1.0,1\n"
        ds = parse_ci_log(io.StringIO(text))
        assert [c.index for c in ds.cycles] == [0, 1]

    def test_round_trip_is_idempotent(self):
        ds = parse_ci_log(io.StringIO(CANONICAL))
        text = serialize_canonical(ds)
        again = parse_ci_log(io.StringIO(text))
        assert serialize_canonical(again) == text
        assert again.cycles == ds.cycles


class TestAbbParsing:
    def test_semicolon_format_with_name_identity(self):
        ds = parse_ci_log(io.StringIO(ABB), format="abb")
        assert ds.test_pool == {"netA", "netB"}
        assert [c.index for c in ds.cycles] == [0, 1]
        assert ds.cycles[0].record_for("netA").status == 0

    def test_missing_columns_rejected(self):
        with pytest.raises(ParseError):
            parse_ci_log(io.StringIO("Id;Duration\n"), format="abb")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_ci_log(io.StringIO(CANONICAL), format="tsv")


class TestStats:
    def test_counts(self):
        ds = parse_ci_log(io.StringIO(CANONICAL))
        s = dataset_stats(ds)
        assert s.distinct_tests == 3
        assert s.commit_count == 2
        assert s.execution_count == 4
        assert s.failed_fraction == pytest.approx(0.5)

    def test_empty_dataset_all_zero(self):
        ds = parse_ci_log(io.StringIO("cycle,test_id,duration,verdict\n"))
        s = dataset_stats(ds)
        assert (s.distinct_tests, s.commit_count, s.execution_count) == (0, 0, 0)
        assert s.failed_fraction == 0.0


class TestSynthGenerator:
    def test_noiseless_fixed_failure_count(self):
        ds = synth_generate(SynthConfig(10, 5, 0.2, 0.0, seed=1))
        for cycle in ds.cycles:
            assert cycle.failure_count() == 2

    def test_same_seed_is_byte_identical(self):
        cfg = SynthConfig(8, 6, 0.25, 0.1, seed=3)
        assert serialize_canonical(synth_generate(cfg)) == serialize_canonical(
            synth_generate(cfg)
        )

    def test_zero_failures_without_noise(self):
        ds = synth_generate(SynthConfig(6, 4, 0.0, 0.0, seed=2))
        assert dataset_stats(ds).failed_fraction == 0.0

    def test_every_test_runs_every_cycle(self):
        cfg = SynthConfig(7, 9, 0.3, 0.05, seed=5)
        ds = synth_generate(cfg)
        s = dataset_stats(ds)
        assert s.execution_count == 7 * 9
        assert s.distinct_tests == 7

    def test_failing_subset_size_uses_ceiling(self):
        ds = synth_generate(SynthConfig(10, 3, 0.11, 0.0, seed=6))
        assert ds.cycles[0].failure_count() == math.ceil(0.11 * 10)

    def test_noiseless_stats_match_closed_form(self):
        cfg = SynthConfig(20, 10, 0.25, 0.0, 1.0, 2.0, seed=7)
        s = dataset_stats(synth_generate(cfg))
        assert s.execution_count == 200
        assert s.failed_fraction == pytest.approx(5 / 20)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(always_fail_fraction=1.5)
        with pytest.raises(ValueError):
            SynthConfig(duration_min=2.0, duration_max=1.0)
