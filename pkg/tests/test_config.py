import logging

import pytest
from pydantic import ValidationError

from entropic.config import Settings, configure_logging, load_settings
from entropic.errors import ConvergenceError, EntropicError, InvalidPoint, ParseError


def test_defaults(monkeypatch):
    for name in ("EOF_THREADS", "EOF_STRICT", "EOF_LEDGER", "EOF_ART_DIR", "EOF_DATA"):
        monkeypatch.delenv(name, raising=False)
    settings = load_settings()
    assert settings.threads >= 1
    assert settings.strict is False
    assert settings.ledger is None
    assert settings.art_dir == "results"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("EOF_THREADS", "3")
    monkeypatch.setenv("EOF_STRICT", "yes")
    monkeypatch.setenv("EOF_LEDGER", "/tmp/eof.db")
    monkeypatch.setenv("EOF_ART_DIR", "out")
    settings = load_settings()
    assert settings.threads == 3
    assert settings.strict is True
    assert settings.ledger == "/tmp/eof.db"
    assert settings.art_dir == "out"


def test_thread_count_must_be_positive():
    with pytest.raises(ValidationError):
        Settings(threads=0)


def test_configure_logging_installs_one_handler():
    configure_logging(logging.DEBUG)
    configure_logging(logging.INFO)
    logger = logging.getLogger("entropic")
    assert len(logger.handlers) == 1
    assert logger.level == logging.INFO


def test_error_hierarchy():
    assert issubclass(InvalidPoint, EntropicError)
    err = ParseError("bad cell", row=4, column="x")
    assert str(err) == "bad cell at row 4, column 'x'"
    assert (err.row, err.column) == (4, "x")
    conv = ConvergenceError("stopped", grad_norm=0.5, iterations=7)
    assert conv.grad_norm == 0.5 and conv.iterations == 7
