import logging

import pandas as pd
import pytest

from scripts.analysis.report_tables import (
    AGGREGATION_TABLE, FILTER_TABLE, SUMMARY_FILE, backend_column, emit_figure_csv, figure_frame,
    figure_stem, read_selectivity, selectivity_frame, selectivity_tables, summarize,
)
from scripts.core.bench import Outcome, Phase, RunRecord
from scripts.core.oracle import SelectivityReport
from scripts.core.queries import catalogue_instances, parse_query_text
from scripts.visualization.plot_response_times import emit_plots, plot_frame

BACKENDS = ["basex", "exist-db", "sedna", "mongodb", "couchdb", "couchbase"]
SFS = ["0.125", "0.25", "0.5", "1"]


def _run(elapsed, index=1, phase=Phase.WARM, outcome=Outcome.SUCCESS, backend="basex",
         query="Q6", sf="1"):
    return RunRecord(backend=backend, query=query, sf=sf, run_index=index, phase=phase,
                     elapsed_ms=elapsed, outcome=outcome)


def _full_grid(query="Q6"):
    runs = []
    for b, backend in enumerate(BACKENDS):
        for s, sf in enumerate(SFS):
            for i in range(1, 4):
                runs.append(_run(10.0 * (b + 1) * (s + 1) + i, i, backend=backend, query=query, sf=sf))
    return runs


class TestSummarize:

    def test_sample_statistics(self):
        runs = [_run(v, i) for i, v in enumerate([2, 4, 4, 4, 5, 5, 7, 9], start=1)]
        (stats,) = summarize(runs)
        assert stats.mean_ms == pytest.approx(5.0)
        assert stats.std_ms == pytest.approx(2.138, abs=1e-3)
        assert stats.run_count == 8 and not stats.low_confidence

    def test_cold_runs_never_count(self):
        runs = [_run(1000.0, 0, phase=Phase.COLD), _run(10.0, 1), _run(20.0, 2)]
        (stats,) = summarize(runs)
        assert stats.mean_ms == pytest.approx(15.0)

    def test_single_run_is_low_confidence(self):
        (stats,) = summarize([_run(12.0)])
        assert stats.std_ms == 0.0 and stats.low_confidence

    def test_errors_are_counted_not_averaged(self):
        runs = [_run(10.0, 1), _run(0.0, 2, outcome=Outcome.TIMEOUT), _run(30.0, 3)]
        (stats,) = summarize(runs)
        assert stats.mean_ms == pytest.approx(20.0) and stats.error_count == 1

    def test_all_failed(self):
        (stats,) = summarize([_run(0.0, outcome=Outcome.ERROR)])
        assert stats.mean_ms is None and stats.run_count == 0

    def test_order_independent(self):
        runs = _full_grid()
        assert summarize(runs) == summarize(list(reversed(runs)))


class TestNames:

    def test_figure_stems(self):
        stems = [figure_stem(q) for q in catalogue_instances()]
        assert stems == [
            "q1_kw1", "q1_kw2", "q1_kw3", "q2_kw1a2", "q2_kw1a3", "q2_kw2a3",
            "q2_kw1o2", "q2_kw1o3", "q2_kw2o3", "q3_kw1a2a3", "q3_kw1o2o3",
            "count_docs_authors", "count_docs_authors_year",
            "count_all_authors_year_kw1a2a3", "count_all_authors_year_kw1o2o3",
        ]

    def test_backend_column(self):
        assert backend_column("exist-db") == "EXISTDB"
        assert backend_column("CouchBase") == "COUCHBASE"


class TestFigureCsv:

    def test_shape_and_column_order(self):
        frame = figure_frame(summarize(_full_grid()), "Q6")
        assert list(frame.columns) == ["NO_DOCS"] + [
            f"{b}_{kind}" for b in ("BASEX", "EXISTDB", "SEDNA", "MONGODB", "COUCHDB", "COUCHBASE")
            for kind in ("AVG", "STD")
        ]
        assert frame["NO_DOCS"].tolist() == [1, 2, 3, 4]
        assert frame["BASEX_AVG"].tolist() == pytest.approx([12.0, 22.0, 32.0, 42.0])
        assert frame["SEDNA_STD"].tolist() == pytest.approx([1.0] * 4)

    def test_missing_scale_factor_is_empty(self, tmp_path):
        runs = [r for r in _full_grid() if r.sf != "0.5"]
        (path, *_) = emit_figure_csv(summarize(runs), [], tmp_path)
        lines = path.read_text(encoding='utf-8').splitlines()
        assert len(lines) == 5
        assert lines[3].startswith("3,,")

    def test_rows_outside_benchmark_sfs_skipped(self, tmp_path, caplog):
        runs = _full_grid() + [
            _run(5.0, 1, sf=""), _run(7.0, 2, sf=""),
            _run(9.0, 1, backend="ravendb", sf="live"),
        ]
        stats = summarize(runs)
        with caplog.at_level(logging.WARNING, logger="scripts.analysis.report_tables"):
            frame = figure_frame(stats, "Q6")
        pd.testing.assert_frame_equal(frame, figure_frame(summarize(_full_grid()), "Q6"))
        assert "RAVENDB_AVG" not in frame.columns
        assert "fuera de los SF de benchmark" in caplog.text
        paths = emit_figure_csv(stats, [], tmp_path)
        summary = pd.read_csv(paths[-1], keep_default_na=False, dtype={"sf": str})
        assert set(summary["sf"]) == set(SFS) | {"", "live"}

    def test_files_written(self, tmp_path):
        runs = _full_grid("Q6") + _full_grid("Q1(i=2)")
        paths = emit_figure_csv(summarize(runs), [], tmp_path)
        assert [p.name for p in paths] == ["q1_kw2.csv", "count_docs_authors.csv", SUMMARY_FILE]
        first_row = paths[0].read_text(encoding='utf-8').splitlines()[1]
        assert first_row.split(",")[:2] == ["1", "12.000"]


class TestSelectivityTables:

    def _entries(self):
        entries = []
        for sf in SFS:
            for k, q in enumerate(catalogue_instances()):
                entries.append((sf, SelectivityReport(q.text, k, 100, 1 - k / 100)))
        return entries

    def test_column_order(self):
        filters, aggregations = selectivity_tables(self._entries())
        assert list(filters.columns) == ["SF", "Q1_1", "Q1_2", "Q1_3", "Q2_12", "Q2_13", "Q2_23",
                                         "Q3_12", "Q3_13", "Q3_23", "Q4", "Q5"]
        assert list(aggregations.columns) == ["SF", "Q6", "Q7", "Q8", "Q9"]
        assert filters["SF"].tolist() == SFS
        assert aggregations["Q6"].tolist() == pytest.approx([0.89] * 4)

    def test_emitted_with_figures(self, tmp_path):
        paths = emit_figure_csv(summarize(_full_grid()), self._entries(), tmp_path)
        assert {p.name for p in paths} >= {FILTER_TABLE, AGGREGATION_TABLE}

    def test_selectivity_file_round_trip(self, tmp_path):
        entries = self._entries()
        path = tmp_path / "selectivity.csv"
        selectivity_frame(entries).to_csv(path, index=False)
        assert read_selectivity(path) == entries


class TestPlots:

    def test_bar_count(self):
        import matplotlib.pyplot as plt

        frame = figure_frame(summarize(_full_grid()), "Q6")
        fig, ax = plt.subplots()
        containers = plot_frame(frame, ax)
        assert sum(len(c.patches) for c in containers) == 24
        plt.close(fig)

    def test_deterministic_images(self, tmp_path):
        (csv,) = emit_figure_csv(summarize(_full_grid()), [], tmp_path / "csv")[:1]
        first = emit_plots([csv], tmp_path / "a")[0].read_bytes()
        second = emit_plots([csv], tmp_path / "b")[0].read_bytes()
        assert first == second

    def test_empty_csv(self, tmp_path):
        empty = tmp_path / "q1_kw1.csv"
        empty.write_text("", encoding='utf-8')
        (png,) = emit_plots([empty], tmp_path / "png")
        assert png.name == "q1_kw1.png" and png.stat().st_size > 0

    def test_header_only_csv(self, tmp_path):
        frame = pd.DataFrame({"NO_DOCS": [1, 2, 3, 4]})
        path = tmp_path / "q1_kw3.csv"
        frame.to_csv(path, index=False)
        assert emit_plots([path], tmp_path)[0].exists()


def test_query_labels_round_trip_through_text():
    for q in catalogue_instances():
        assert parse_query_text(q.text).label == q.label
