import itertools

import pytest

from scripts.core.adapters import Adapter, AdapterResponse
from scripts.core.bench import (
    Outcome, Phase, PrefillMode, Protocol, RunRecord, execute, read_runs, run_suite, write_runs,
)
from scripts.core.config import AdapterKind, BackendConfig
from scripts.core.exceptions import (
    AdapterFailure, BackendUnreachable, InvalidParameterError, QueryTimeout,
)
from scripts.core.queries import parse_query_list, parse_query_text
from scripts.core.translate import Dialect, translate


class ScriptedAdapter(Adapter):
    """Adaptador sin backend: cada run consume la siguiente respuesta del guion."""

    def __init__(self, cfg, script=(), install_error=None, reachable=True):
        super().__init__(cfg)
        self.script = list(script)
        self.install_error = install_error
        self.reachable = reachable
        self.texts = []
        self.installed = []

    def ping(self):
        if not self.reachable:
            raise BackendUnreachable(self.name, "caído")

    def run(self, text, timeout=None):
        self.texts.append(text)
        step = self.script.pop(0) if self.script else 1
        if isinstance(step, Exception):
            raise step
        return AdapterResponse("[]", step)

    def install(self, setup_text):
        if self.install_error is not None:
            raise self.install_error
        self.installed.append(setup_text)

    def load(self, files):
        pass

    def count(self):
        return 0


def _cfg(dialect=Dialect.N1QL, name="fake"):
    return BackendConfig(name=name, adapter_kind=AdapterKind.COMMAND_RUNNER, dialect=dialect,
                         connection={"command": ["true"]}, timeout=5)


def _clock(step=0.5):
    ticks = itertools.count(0, step)
    return lambda: next(ticks)


def _tq(text="Q1(i=1)", dialect=Dialect.N1QL):
    return translate(parse_query_text(text), dialect)


class TestExecute:

    def test_cold_plus_ten_warm(self):
        cfg = _cfg()
        adapter = ScriptedAdapter(cfg)
        records = execute(cfg, adapter, _tq(), sf="1", clock=_clock())
        assert len(records) == 11
        assert [r.run_index for r in records] == list(range(11))
        assert records[0].phase == Phase.COLD
        assert all(r.phase == Phase.WARM for r in records[1:])
        assert all(r.elapsed_ms == 500.0 for r in records)
        assert all(r.sf == "1" and r.query == "Q1(i=1)" for r in records)
        assert len(adapter.texts) == 11

    def test_zero_runs_keeps_cold_run(self):
        cfg = _cfg()
        records = execute(cfg, ScriptedAdapter(cfg), _tq(), Protocol(runs=0), clock=_clock())
        assert [r.phase for r in records] == [Phase.COLD]

    def test_negative_runs(self):
        cfg = _cfg()
        with pytest.raises(InvalidParameterError):
            execute(cfg, ScriptedAdapter(cfg), _tq(), Protocol(runs=-1))

    def test_failures_are_recorded_per_run(self):
        cfg = _cfg()
        script = [3, 3, QueryTimeout("fake", 5), 3, AdapterFailure("fake", "syntax error")]
        records = execute(cfg, ScriptedAdapter(cfg, script), _tq(), Protocol(runs=4), clock=_clock())
        assert [r.outcome for r in records] == [
            Outcome.SUCCESS, Outcome.SUCCESS, Outcome.TIMEOUT, Outcome.SUCCESS, Outcome.ERROR,
        ]
        assert records[2].result_count is None
        assert records[4].detail == "syntax error"
        assert records[3].result_count == 3

    def test_unreachable_backend(self):
        cfg = _cfg()
        with pytest.raises(BackendUnreachable):
            execute(cfg, ScriptedAdapter(cfg, reachable=False), _tq())

    def test_setup_installed_before_runs(self):
        cfg = _cfg(Dialect.COUCH_MANGO_VIEW)
        adapter = ScriptedAdapter(cfg)
        tq = _tq("Q7", Dialect.COUCH_MANGO_VIEW)
        execute(cfg, adapter, tq, Protocol(runs=1), clock=_clock())
        assert adapter.installed == list(tq.setup_texts)


class TestRunSuite:

    def test_family_prefill(self):
        cfg = _cfg()
        queries = parse_query_list("Q1(i=1),Q1(i=2),Q6,Q7")
        records = run_suite(cfg, ScriptedAdapter(cfg), queries, "0.5",
                            Protocol(runs=2, prefill=PrefillMode.FAMILY), clock=_clock())
        cold = [r.query for r in records if r.phase == Phase.COLD]
        assert cold == ["Q1(i=1)", "Q6"]
        assert all(r.prefill == "family" for r in records)
        assert len(records) == 4 * 2 + 2

    def test_no_prefill(self):
        cfg = _cfg()
        records = run_suite(cfg, ScriptedAdapter(cfg), parse_query_list("Q6..Q9"), "1",
                            Protocol(runs=3, prefill="none"), clock=_clock())
        assert len(records) == 12 and all(r.phase == Phase.WARM for r in records)

    def test_install_failure_does_not_stop_suite(self):
        cfg = _cfg(Dialect.COUCH_MANGO_VIEW)
        adapter = ScriptedAdapter(cfg, install_error=AdapterFailure("fake", "HTTP 500: boom"))
        records = run_suite(cfg, adapter, parse_query_list("Q1(i=1),Q6"), "1",
                            Protocol(runs=2), clock=_clock())
        by_query = {q: [r.outcome for r in records if r.query == q] for q in ("Q1(i=1)", "Q6")}
        assert by_query["Q1(i=1)"] == [Outcome.SUCCESS] * 3
        assert by_query["Q6"] == [Outcome.ERROR] * 3
        assert all(r.detail == "HTTP 500: boom" for r in records if r.query == "Q6")

    def test_install_timeout_does_not_stop_suite(self):
        cfg = _cfg(Dialect.COUCH_MANGO_VIEW)
        adapter = ScriptedAdapter(cfg, install_error=QueryTimeout("fake", 5))
        records = run_suite(cfg, adapter, parse_query_list("Q1(i=1),Q6,Q7"), "1",
                            Protocol(runs=2), clock=_clock())
        by_query = {q: [r.outcome for r in records if r.query == q] for q in ("Q1(i=1)", "Q6", "Q7")}
        assert by_query["Q1(i=1)"] == [Outcome.SUCCESS] * 3
        assert by_query["Q6"] == [Outcome.TIMEOUT] * 3
        assert by_query["Q7"] == [Outcome.TIMEOUT] * 3


class TestRunsFile:

    def _records(self):
        cfg = _cfg()
        script = [10, QueryTimeout("fake", 5), AdapterFailure("fake", 'bad, "quoted" text')]
        return execute(cfg, ScriptedAdapter(cfg, script), _tq(), Protocol(runs=2), sf="0.125",
                       clock=_clock())

    def test_round_trip(self, tmp_path):
        records = self._records()
        path = write_runs(records, tmp_path / "runs.csv")
        assert read_runs(path) == records

    def test_header_and_append(self, tmp_path):
        records = self._records()
        path = tmp_path / "runs.csv"
        write_runs(records, path, append=True)
        write_runs(records, path, append=True)
        lines = path.read_text(encoding='utf-8').splitlines()
        assert lines[0].startswith("backend,query,sf,run_index,phase,elapsed_ms,outcome,result_count")
        assert sum(1 for line in lines if line.startswith("backend,")) == 1
        assert len(read_runs(path)) == 2 * len(records)

    def test_minimal_columns(self, tmp_path):
        path = tmp_path / "runs.csv"
        path.write_text(
            "backend,query,sf,run_index,phase,elapsed_ms,outcome,result_count\n"
            "basex,Q6,1,1,warm,12.5,success,40\n",
            encoding='utf-8',
        )
        (record,) = read_runs(path)
        assert record == RunRecord(backend="basex", query="Q6", sf="1", run_index=1,
                                   phase=Phase.WARM, elapsed_ms=12.5, outcome=Outcome.SUCCESS,
                                   result_count=40)
