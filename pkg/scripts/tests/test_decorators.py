import logging
from types import SimpleNamespace

import pytest

from scripts.core.decorators import format_elapsed, log_stage, timer, validate_parameters
from scripts.core.exceptions import InvalidParameterError


@pytest.mark.parametrize("seconds,text", [
    (0.0042, "4.2 ms"),
    (2.5, "2.50 s"),
    (150.0, "2.5 min"),
])
def test_format_elapsed(seconds, text):
    assert format_elapsed(seconds) == text


def test_timer_logs_and_returns(caplog):
    @timer
    def work(x):
        return x * 2

    with caplog.at_level(logging.INFO, logger="scripts.core.decorators"):
        assert work(21) == 42
    assert "[timer] work()" in caplog.text


class TestValidateParameters:

    @staticmethod
    @validate_parameters(('runs', lambda v: v >= 0, "debe ser no negativo"))
    def _run(name, runs=10):
        return runs

    def test_positional_and_keyword(self):
        assert self._run("a", 3) == 3
        assert self._run("a", runs=0) == 0

    def test_default_not_checked(self):
        assert self._run("a") == 10

    def test_rejects(self):
        with pytest.raises(InvalidParameterError) as info:
            self._run("a", -1)
        assert info.value.param_name == 'runs' and info.value.value == -1


def test_log_stage_reads_arguments_and_attributes(caplog):
    @log_stage('name', 'sf')
    def stage(cfg, sf):
        return sf

    cfg = SimpleNamespace(name="basex")
    with caplog.at_level(logging.INFO, logger="scripts.core.decorators"):
        stage(cfg, "0.5")
    assert "name=basex" in caplog.text and "sf=0.5" in caplog.text
    assert "stage() finalizado" in caplog.text


def test_log_stage_reraises(caplog):
    @log_stage()
    def broken():
        raise InvalidParameterError('x', 1)

    with caplog.at_level(logging.INFO, logger="scripts.core.decorators"):
        with pytest.raises(InvalidParameterError):
            broken()
    assert "broken() falló" in caplog.text
