import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dbbo.profiler import RunRecord, record_evaluation
from dbbo.stats import (
    FixedTargetTable,
    fixed_target_curve,
    format_float,
    gradient,
    gradients,
    mean_optimization_time,
    normalized_summary_rows,
    read_fixed_target_csv,
    relative_difference,
    rolling_gradient,
    write_fixed_target_csv,
)


def record_from_trace(n, trace, run_index=0):
    record = RunRecord.fresh("alg", "prob", run_index, run_index + 1, n)
    for count, fitness in enumerate(trace, start=1):
        record_evaluation(record, count, fitness)
    record.success = record.final_fitness == n
    return record


def record_from_hits(n, hits, run_index=0):
    """Build a record directly from a monotone first-hit prefix."""
    record = RunRecord.fresh("alg", "prob", run_index, run_index + 1, n)
    record.first_hit[: len(hits)] = hits
    record.final_fitness = len(hits) - 1
    record.total_evaluations = int(hits[-1])
    record.success = record.final_fitness == n
    return record


def oracle_curve(records, n):
    """Definition-level reaggregation used to pin the fast path exactly."""
    means, stds, hits = [], [], []
    for v in range(n + 1):
        values = [float(r.first_hit[v]) for r in records if r.first_hit[v] >= 0]
        hits.append(len(values))
        if not values:
            means.append(math.nan)
            stds.append(math.nan)
            continue
        mean = math.fsum(values) / len(values)
        means.append(mean)
        if len(values) < 2:
            stds.append(math.nan)
        else:
            var = math.fsum((x - mean) ** 2 for x in values) / (len(values) - 1)
            stds.append(math.sqrt(var))
    return means, stds, hits


monotone_hits = st.lists(st.integers(1, 10_000), min_size=1, max_size=30).map(
    lambda deltas: list(np.cumsum(deltas))
)


class TestFixedTargetCurve:
    def test_simple_means(self):
        records = [record_from_hits(2, [1, h, h]) for h in (100, 200, 300)]
        table = fixed_target_curve(records)
        assert table.mean.tolist() == [1.0, 200.0, 200.0]
        assert table.std[1] == pytest.approx(100.0)
        assert table.hits.tolist() == [3, 3, 3]
        assert table.runs == 3

    def test_partial_hits_are_conditional(self):
        reached = record_from_hits(3, [1, 5, 9, 20])
        stalled = record_from_hits(3, [1, 7])
        table = fixed_target_curve([reached, stalled])
        assert table.mean.tolist()[:2] == [1.0, 6.0]
        assert table.mean[2] == 9.0
        assert math.isnan(table.mean[3]) is False
        assert table.hits.tolist() == [2, 2, 1, 1]

    def test_unreached_target_is_nan(self):
        table = fixed_target_curve([record_from_hits(3, [1, 4])])
        assert math.isnan(table.mean[3])
        assert math.isnan(table.std[3])
        assert table.hits[3] == 0

    def test_matches_definition_exactly(self):
        rng = random.Random(5)
        n = 12
        records = []
        for k in range(25):
            hits = list(np.cumsum([rng.randint(1, 500) for _ in range(rng.randint(1, n + 1))]))
            records.append(record_from_hits(n, hits, run_index=k))
        table = fixed_target_curve(records)
        means, stds, hits = oracle_curve(records, n)
        for v in range(n + 1):
            assert (math.isnan(table.mean[v]) and math.isnan(means[v])) or table.mean[
                v
            ] == means[v]
            assert (math.isnan(table.std[v]) and math.isnan(stds[v])) or table.std[v] == stds[v]
            assert table.hits[v] == hits[v]

    def test_record_order_is_irrelevant(self):
        rng = random.Random(9)
        records = [
            record_from_hits(6, list(np.cumsum([rng.randint(1, 99) for _ in range(7)])), k)
            for k in range(20)
        ]
        forward = fixed_target_curve(records)
        backward = fixed_target_curve(records[::-1])
        assert forward.mean.tobytes() == backward.mean.tobytes()
        assert forward.std.tobytes() == backward.std.tobytes()

    def test_explicit_targets(self):
        records = [record_from_hits(10, list(range(1, 12)))]
        table = fixed_target_curve(records, targets=[0, 5, 10])
        assert table.targets.tolist() == [0, 5, 10]
        assert table.mean.tolist() == [1.0, 6.0, 11.0]
        with pytest.raises(ValueError):
            fixed_target_curve(records, targets=[0, 11])

    def test_input_validation(self):
        with pytest.raises(ValueError):
            fixed_target_curve([])
        with pytest.raises(ValueError):
            fixed_target_curve([record_from_hits(3, [1]), record_from_hits(4, [1])])


class TestOptTime:
    def test_mean_median_std(self):
        records = [record_from_hits(2, [1, h, h]) for h in (100, 200, 300)]
        summary = mean_optimization_time(records)
        assert summary.mean == 200.0
        assert summary.median == 200.0
        assert summary.std == pytest.approx(100.0)
        assert summary.successes == 3 and summary.runs == 3

    def test_even_count_median(self):
        records = [record_from_hits(1, [1, h]) for h in (10, 20, 30, 100)]
        assert mean_optimization_time(records).median == 25.0

    def test_unsuccessful_runs_excluded(self):
        good = record_from_hits(2, [1, 4, 9])
        bad = record_from_hits(2, [1, 4])
        summary = mean_optimization_time([good, bad])
        assert summary.mean == 9.0
        assert summary.successes == 1 and summary.runs == 2

    def test_zero_successes_is_nan_not_error(self):
        summary = mean_optimization_time([record_from_hits(5, [1, 3])])
        assert math.isnan(summary.mean)
        assert math.isnan(summary.median)
        assert summary.successes == 0 and summary.runs == 1

    def test_normalizations(self):
        records = [record_from_hits(100, [1] + [5000] * 100)]
        summary = mean_optimization_time(records)
        assert summary.norm_nlogn == pytest.approx(5000.0 / (100 * math.log(100)))
        assert summary.norm_n2 == pytest.approx(0.5)


class TestGradients:
    def table(self):
        # T: 1, 3, 6, 10, 15 -> G: 2, 3, 4, 5
        return fixed_target_curve([record_from_hits(4, [1, 3, 6, 10, 15])])

    def test_gradient_examples(self):
        table = self.table()
        assert gradient(table, 1) == 2.0
        assert gradient(table, 4) == 5.0
        assert gradient(table, 0) is None

    def test_gradient_vector(self):
        g = gradients(self.table())
        assert math.isnan(g[0])
        assert g[1:].tolist() == [2.0, 3.0, 4.0, 5.0]

    def test_gradient_none_when_undefined(self):
        table = fixed_target_curve([record_from_hits(4, [1, 3])])
        assert gradient(table, 3) is None

    def test_rolling(self):
        table = self.table()
        assert rolling_gradient(table, 1, window=2) == 2.5
        assert rolling_gradient(table, 1, window=4) == 3.5
        assert rolling_gradient(table, 3, window=3) is None
        with pytest.raises(ValueError):
            rolling_gradient(table, 1, window=0)

    def test_relative_difference_zero_for_identical(self):
        table = self.table()
        assert relative_difference(table, table, 1, window=4) == 0.0

    def test_relative_difference_example(self):
        fast = self.table()
        # T: 1, 5, 11, 19, 29 -> G: 4, 6, 8, 10, twice the fast table's
        slow = fixed_target_curve([record_from_hits(4, [1, 5, 11, 19, 29])])
        assert relative_difference(slow, fast, 1, window=4) == pytest.approx(1.0)
        assert relative_difference(fast, slow, 1, window=4) == pytest.approx(-0.5)

    def test_relative_difference_undefined_cases(self):
        table = self.table()
        flat = fixed_target_curve([record_from_hits(4, [1, 1, 1, 1, 1])])
        assert relative_difference(table, flat, 1, window=2) is None  # zero baseline
        short = fixed_target_curve([record_from_hits(4, [1, 3])])
        assert relative_difference(short, table, 1, window=4) is None

    @given(st.lists(st.integers(1, 1000), min_size=2, max_size=25))
    def test_telescoping_single_record_is_exact(self, deltas):
        hits = list(np.cumsum(deltas))
        n = len(hits) - 1
        table = fixed_target_curve([record_from_hits(n, hits)])
        total = math.fsum(gradient(table, i) for i in range(1, n + 1))
        assert total == table.mean[n] - table.mean[0]

    @given(
        st.integers(0, 2),
        st.lists(st.lists(st.integers(1, 500), min_size=5, max_size=5), min_size=1, max_size=8),
    )
    def test_telescoping_power_of_two_runs_is_exact(self, log_copies, delta_rows):
        # 2^k identical copies keep every mean a dyadic rational, so the
        # telescoped sum has no rounding at all
        records = []
        k = 0
        for deltas in delta_rows:
            for _ in range(2**log_copies):
                records.append(record_from_hits(4, list(np.cumsum(deltas)), run_index=k))
                k += 1
        table = fixed_target_curve(records)
        total = math.fsum(gradient(table, i) for i in range(1, 5))
        assert total == table.mean[4] - table.mean[0]


class TestFormatting:
    def test_format_float(self):
        assert format_float(float("nan")) == "nan"
        assert format_float(200.0) == "200"
        assert format_float(0.5) == "0.5"
        assert format_float(1.0 / 3.0) == "0.3333333333"

    def test_csv_round_trip(self, tmp_path):
        table = fixed_target_curve(
            [record_from_hits(3, [1, 7, 9, 13]), record_from_hits(3, [1, 4])]
        )
        path = tmp_path / "x.agg.csv"
        write_fixed_target_csv(path, table)
        back = read_fixed_target_csv(path)
        assert back.targets.tolist() == table.targets.tolist()
        assert back.hits.tolist() == table.hits.tolist()
        assert back.runs == table.runs
        np.testing.assert_allclose(back.mean, table.mean, rtol=1e-9)

    def test_write_is_idempotent_through_read(self, tmp_path):
        table = fixed_target_curve(
            [record_from_hits(5, [1, 3, 10, 11, 40, 41]), record_from_hits(5, [1, 2])]
        )
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        write_fixed_target_csv(first, table)
        write_fixed_target_csv(second, read_fixed_target_csv(first))
        assert first.read_bytes() == second.read_bytes()

    def test_display_cap_clips_means(self, tmp_path):
        table = fixed_target_curve([record_from_hits(2, [1, 50_000, 90_000])])
        path = tmp_path / "capped.csv"
        write_fixed_target_csv(path, table, cap=60_000)
        back = read_fixed_target_csv(path)
        assert back.mean.tolist() == [1.0, 50_000.0, 60_000.0]
        # the table itself is untouched
        assert table.mean[2] == 90_000.0

    def test_header_and_malformed_row_errors(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("wrong\n")
        with pytest.raises(ValueError):
            read_fixed_target_csv(path)
        path.write_text("target,mean_evals,std_evals,hits,runs\n0,x,1,1,1\n")
        with pytest.raises(ValueError, match=":2"):
            read_fixed_target_csv(path)
        path.write_text("target,mean_evals,std_evals,hits,runs\n")
        with pytest.raises(ValueError, match="no data"):
            read_fixed_target_csv(path)


class TestNormalizedRows:
    def test_pools_runs_across_instances(self):
        from dbbo.algorithms import parse_algorithm
        from dbbo.problems import generate_instance
        from dbbo.profiler import CellResult, ExperimentCell

        spec = parse_algorithm("rls")
        results = []
        for instance_id, hit in ((0, 100), (1, 200)):
            inst = generate_instance("onemax", 4, instance_id, 1)
            cell = ExperimentCell(spec, inst)
            record = record_from_hits(4, [1, 2, 3, 4, hit])
            results.append(CellResult(cell, [record]))
        rows = normalized_summary_rows(results)
        assert len(rows) == 1
        assert rows[0]["algorithm"] == "rls"
        assert rows[0]["dimension"] == 4
        assert rows[0]["mean_opt_time"] == 150.0
        assert rows[0]["norm_n2"] == pytest.approx(150.0 / 16.0)

    def test_distinct_dimensions_stay_separate(self):
        from dbbo.algorithms import parse_algorithm
        from dbbo.problems import generate_instance
        from dbbo.profiler import CellResult, ExperimentCell

        spec = parse_algorithm("rls")
        results = []
        for n in (4, 8):
            inst = generate_instance("onemax", n, 0, 1)
            record = record_from_hits(n, [1] * (n + 1))
            record.first_hit[:] = np.arange(1, n + 2)
            record.final_fitness = n
            record.success = True
            results.append(CellResult(ExperimentCell(spec, inst), [record]))
        rows = normalized_summary_rows(results)
        assert [row["dimension"] for row in rows] == [4, 8]


class TestOnFixtureData:
    def test_rls_mean_matches_single_flip_theory(self, rls_lo500):
        summary = rls_lo500.opt
        assert summary.successes == 100
        assert summary.norm_n2 == pytest.approx(0.5, abs=0.03)

    def test_lo_gradients_positive_and_increasing(self, lo500_ea1):
        table = lo500_ea1.table
        early = rolling_gradient(table, 50)
        late = rolling_gradient(table, 450)
        assert early is not None and late is not None
        assert 0 < early < late
