"""Reader behavior: schemas parse, violations name file and line."""

import math

import numpy as np
import pytest

from dbbo_plots.io import (
    AGG_HEADER,
    GRADIENTS_HEADER,
    NORMALIZED_HEADER,
    SUMMARY_HEADER,
    PlotInputError,
    normalizer_value,
    read_fixed_target,
    read_gradients,
    read_normalized,
    read_summary,
    series_label,
    sniff_mean_table,
    successes,
)


class TestFixedTargetReader:
    def test_round_trip_values(self, write_csv):
        path = write_csv(
            "alg__om16_0_7.agg.csv",
            AGG_HEADER,
            [(0, 1.0, 0.0, 4, 4), (1, 3.5, 1.25, 4, 4), (2, "nan", "nan", 0, 4)],
        )
        curve = read_fixed_target(path)
        assert curve.label == "alg"
        assert curve.targets.tolist() == [0, 1, 2]
        assert curve.mean[1] == 3.5
        assert math.isnan(curve.mean[2]) and math.isnan(curve.std[2])
        assert curve.hits.tolist() == [4, 4, 0]
        assert curve.runs == 4

    def test_wrong_header_cites_line_one(self, write_csv):
        path = write_csv("bad.csv", ("target", "mean"), [(0, 1.0)])
        with pytest.raises(PlotInputError) as err:
            read_fixed_target(path)
        assert f"{path}:1:" in str(err.value)
        assert err.value.line_no == 1

    def test_bad_integer_cites_data_line(self, write_csv):
        path = write_csv(
            "bad.agg.csv", AGG_HEADER, [(0, 1.0, 0.0, 4, 4), ("x", 2.0, 0.0, 4, 4)]
        )
        with pytest.raises(PlotInputError) as err:
            read_fixed_target(path)
        assert err.value.line_no == 3
        assert "target" in str(err.value)

    def test_field_count_mismatch(self, write_csv):
        path = write_csv("bad.agg.csv", AGG_HEADER, [(0, 1.0, 0.0, 4)])
        with pytest.raises(PlotInputError, match="expected 5 fields, found 4"):
            read_fixed_target(path)

    def test_header_only_file_is_an_error(self, write_csv):
        path = write_csv("empty.agg.csv", AGG_HEADER, [])
        with pytest.raises(PlotInputError, match="no data rows"):
            read_fixed_target(path)

    def test_completely_empty_file_is_an_error(self, tmp_path):
        path = tmp_path / "void.csv"
        path.write_text("")
        with pytest.raises(PlotInputError, match="<empty file>"):
            read_fixed_target(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(PlotInputError, match="cannot read file"):
            read_fixed_target(tmp_path / "nope.csv")

    def test_inconsistent_runs_column(self, write_csv):
        path = write_csv(
            "bad.agg.csv", AGG_HEADER, [(0, 1.0, 0.0, 4, 4), (1, 2.0, 0.0, 4, 5)]
        )
        with pytest.raises(PlotInputError, match="runs column is not constant"):
            read_fixed_target(path)


class TestOtherReaders:
    def test_summary_rows(self, write_csv):
        path = write_csv(
            "summary.csv",
            SUMMARY_HEADER,
            [("rls", "onemax", 100, 0, 10, 460.5, 1.0)],
        )
        (row,) = read_summary(path)
        assert row.algorithm == "rls"
        assert row.family == "onemax"
        assert (row.dimension, row.instance, row.runs) == (100, 0, 10)
        assert row.mean_opt_time == 460.5
        assert row.success_rate == 1.0

    def test_normalized_rows(self, write_csv):
        path = write_csv(
            "normalized_means.csv",
            NORMALIZED_HEADER,
            [("rls", 100, 4950.0, 10.75, 0.495)],
        )
        (row,) = read_normalized(path)
        assert row.norm_nlogn == 10.75
        assert row.norm_n2 == 0.495

    def test_gradient_series(self, write_csv):
        path = write_csv(
            "a__om.gradients.csv", GRADIENTS_HEADER, [(1, 2.0), (2, "nan"), (3, 6.0)]
        )
        series = read_gradients(path)
        assert series.label == "a"
        assert series.targets.tolist() == [1, 2, 3]
        assert math.isnan(series.values[1])
        assert np.isfinite(series.values[[0, 2]]).all()

    def test_gradient_bad_value_cites_line(self, write_csv):
        path = write_csv("g.gradients.csv", GRADIENTS_HEADER, [(1, 2.0), (2, "?")])
        with pytest.raises(PlotInputError) as err:
            read_gradients(path)
        assert err.value.line_no == 3


class TestSniffAndHelpers:
    def test_sniff_summary(self, write_csv):
        path = write_csv("s.csv", SUMMARY_HEADER, [("a", "om", 8, 0, 1, 5.0, 1.0)])
        assert sniff_mean_table(path) == "summary"

    def test_sniff_normalized(self, write_csv):
        path = write_csv("n.csv", NORMALIZED_HEADER, [("a", 8, 5.0, 0.3, 0.08)])
        assert sniff_mean_table(path) == "normalized"

    def test_sniff_rejects_agg_header(self, write_csv):
        path = write_csv("a.csv", AGG_HEADER, [(0, 1.0, 0.0, 1, 1)])
        with pytest.raises(PlotInputError, match="summary or normalized-means"):
            sniff_mean_table(path)

    @pytest.mark.parametrize(
        "name,expected",
        [
            ("two_rate_r0-2__onemax_16_0_7.agg.csv", "two_rate_r0-2"),
            ("rls__leadingones_500_0_7.display.csv", "rls"),
            ("ea_gt0_lambda-50_p-1overn__onemax_3000_0_7.gradients.csv", "ea_gt0_lambda-50_p-1overn"),
            ("plain.csv", "plain"),
        ],
    )
    def test_series_label(self, name, expected):
        assert series_label(name) == expected

    def test_successes_counts_whole_runs(self):
        from dbbo_plots.io import SummaryRow

        row = SummaryRow("a", "om", 8, 0, 10, 5.0, 0.9)
        assert successes(row) == 9
        full = SummaryRow("a", "om", 8, 0, 4, 5.0, 0.75)
        assert successes(full) == 3

    def test_normalizer_values(self):
        assert normalizer_value(100, "n_ln_n") == pytest.approx(100 * math.log(100))
        assert normalizer_value(100, "n_squared") == 10000.0
        with pytest.raises(ValueError, match="unknown normalizer"):
            normalizer_value(100, "n_cubed")
