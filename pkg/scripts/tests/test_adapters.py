import os
import sys

import pytest

from scripts.core.adapters import (
    CommandRunnerAdapter, HttpEndpointAdapter, count_results, create_adapter, parse_raw_request,
)
from scripts.core.config import AdapterKind, BackendConfig, backend_from_mapping, load_config, select_backend
from scripts.core.exceptions import (
    AdapterFailure, BackendUnreachable, ConfigError, DataFileNotFoundError, QueryTimeout,
)
from scripts.core.translate import Dialect

CONFIG_FILE = os.path.join(os.path.dirname(__file__), '..', '..', 'configs', 'backends.yaml')
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), 'golden')


def _command_cfg(command, **connection):
    return BackendConfig(name="cli", adapter_kind=AdapterKind.COMMAND_RUNNER, dialect=Dialect.XQUERY31,
                         connection={"command": command, **connection}, timeout=10)


class TestConfig:

    def test_shipped_file(self):
        configs = load_config(CONFIG_FILE, env={})
        assert list(configs) == ["basex", "exist-db", "sedna", "mongodb", "couchdb", "couchbase", "mock"]
        assert configs["sedna"].dialect == Dialect.XQUERY10
        assert configs["couchdb"].adapter_kind == AdapterKind.HTTP_ENDPOINT
        assert configs["basex"].timeout == 600

    def test_environment_overrides(self):
        env = {
            "DODBENCH_COUCHDB_PASSWORD": "s3cret",
            "DODBENCH_EXIST_DB_TIMEOUT": "30",
            "DODBENCH_BASEX_COMMAND": "basex -q '{query}'",
        }
        configs = load_config(CONFIG_FILE, env=env)
        assert configs["couchdb"].connection["password"] == "s3cret"
        assert configs["exist-db"].timeout == 30.0
        assert configs["basex"].connection["command"] == ["basex", "-q", "{query}"]

    def test_bad_timeout_override(self):
        with pytest.raises(ConfigError):
            load_config(CONFIG_FILE, env={"DODBENCH_MOCK_TIMEOUT": "soon"})

    @pytest.mark.parametrize("entry", [
        {"adapter": "ftp", "dialect": "N1QL", "connection": {"url": "x"}},
        {"adapter": "http", "dialect": "SQL", "connection": {"url": "x"}},
        {"adapter": "http", "dialect": "N1QL", "connection": {}},
        {"adapter": "http", "dialect": "N1QL", "connection": {"url": "x", "colour": "red"}},
        {"adapter": "http", "dialect": "N1QL", "timeout": 0, "connection": {"url": "x"}},
        {"adapter": "command", "dialect": "N1QL", "connection": {"command": ["x"], "result_format": "xml"}},
    ])
    def test_invalid_entries(self, entry):
        with pytest.raises(ConfigError):
            backend_from_mapping("b", entry, env={})

    def test_missing_file_and_section(self, tmp_path):
        with pytest.raises(DataFileNotFoundError):
            load_config(tmp_path / "none.yaml")
        empty = tmp_path / "empty.yaml"
        empty.write_text("other: 1\n", encoding='utf-8')
        with pytest.raises(ConfigError):
            load_config(empty)

    def test_select_backend(self):
        configs = load_config(CONFIG_FILE, env={})
        assert select_backend(configs, "mock").name == "mock"
        with pytest.raises(ConfigError):
            select_backend(configs, "oracle-db")


class TestCountResults:

    def test_json_shapes(self):
        assert count_results('[{"a": 1}, {"a": 2}]') == 2
        assert count_results('{"rows": [1, 2, 3]}') == 3
        assert count_results('{"results": [7]}', result_keys=["results.0"]) == 7
        assert count_results('{"docs": []}') == 0
        assert count_results('{"other": 1}') is None
        assert count_results("not json") is None

    def test_other_formats(self):
        assert count_results("a\n\nb\nc\n", "lines") == 3
        assert count_results("<row/><row/>", "regex", result_pattern="<row") == 2
        assert count_results('exist:hits="42"', "regex", result_pattern=r'hits="(\d+)"') == 42
        assert count_results(" 17\n", "integer") == 17
        assert count_results("anything", "none") is None

    @pytest.mark.parametrize("backend,dialect", [("basex", "XQuery31"), ("sedna", "XQuery10")])
    def test_xquery_selection_rows(self, backend, dialect):
        with open(os.path.join(GOLDEN_DIR, dialect, "Q1_1.xq"), encoding='utf-8') as fh:
            assert "return <row>{string($r/title)}</row>" in fh.read()
        connection = load_config(CONFIG_FILE, env={})[backend].connection
        body = "<row>Database systems</row>\n<row>Why &lt;row&gt; tags in a database title</row>\n"
        assert count_results(body, connection["result_format"],
                             result_pattern=connection["result_pattern"]) == 2

    def test_unknown_format(self):
        with pytest.raises(ConfigError):
            count_results("x", "yaml")


def test_parse_raw_request():
    method, path, headers, body = parse_raw_request(
        "PUT /dblp/_design/x\nContent-Type: application/json\n\n{\"a\": 1}\n")
    assert (method, path, body) == ("PUT", "/dblp/_design/x", '{"a": 1}')
    assert headers == {"Content-Type": "application/json"}
    assert parse_raw_request("GET /dblp/_design/x/_view/q?group=true\n")[3] == ""
    assert parse_raw_request('xquery version "3.1";\nfor $r in x return $r') is None


class TestCommandRunner:

    def test_query_placeholder(self):
        cfg = _command_cfg([sys.executable, "-c", "import sys; print(sys.argv[1])", "{query}"],
                           result_format="lines")
        response = CommandRunnerAdapter(cfg).run("SELECT 1")
        assert response.body.strip() == "SELECT 1"
        assert response.result_count == 1

    def test_query_file_placeholder(self):
        script = "import sys; print(open(sys.argv[1], encoding='utf-8').read())"
        adapter = CommandRunnerAdapter(_command_cfg([sys.executable, "-c", script, "{query_file}"],
                                                    result_format="none"))
        assert "FROM FILE" in adapter.run("SELECT * FROM FILE").body

    def test_invalid_utf8_output(self):
        script = "import sys; sys.stdout.buffer.write(b'\\xff\\n')"
        adapter = CommandRunnerAdapter(_command_cfg([sys.executable, "-c", script],
                                                    result_format="lines"))
        response = adapter.run("x")
        assert "�" in response.body
        assert response.result_count == 1

    def test_nonzero_exit(self):
        adapter = CommandRunnerAdapter(_command_cfg([sys.executable, "-c", "import sys; sys.exit(3)"]))
        with pytest.raises(AdapterFailure) as info:
            adapter.run("x")
        assert "3" in info.value.detail

    def test_timeout(self):
        adapter = CommandRunnerAdapter(_command_cfg([sys.executable, "-c", "import time; time.sleep(10)"]))
        with pytest.raises(QueryTimeout):
            adapter.run("x", timeout=0.5)

    def test_ping_without_ping_command(self):
        CommandRunnerAdapter(_command_cfg([sys.executable, "-V"])).ping()
        with pytest.raises(BackendUnreachable):
            CommandRunnerAdapter(_command_cfg(["no-such-dbms-client-xyz"])).ping()

    def test_count_command(self):
        cfg = _command_cfg([sys.executable], count_command=[sys.executable, "-c", "print(12)"])
        adapter = CommandRunnerAdapter(cfg)
        assert adapter.count() == 12

    def test_missing_template(self):
        with pytest.raises(AdapterFailure):
            CommandRunnerAdapter(_command_cfg([sys.executable])).install("x")


def test_factory():
    http = BackendConfig(name="h", adapter_kind=AdapterKind.HTTP_ENDPOINT, dialect=Dialect.N1QL,
                         connection={"url": "http://127.0.0.1:1"})
    with create_adapter(http) as adapter:
        assert isinstance(adapter, HttpEndpointAdapter)
    assert isinstance(create_adapter(_command_cfg(["x"])), CommandRunnerAdapter)


def test_http_ping_refused():
    cfg = BackendConfig(name="h", adapter_kind=AdapterKind.HTTP_ENDPOINT, dialect=Dialect.N1QL,
                        connection={"url": "http://127.0.0.1:1"})
    with create_adapter(cfg) as adapter:
        with pytest.raises(BackendUnreachable):
            adapter.ping()
