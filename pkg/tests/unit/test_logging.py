"""Unit tests for logging configuration."""

import json
import logging
import sys
from io import StringIO
from pathlib import Path
from unittest.mock import patch

from pbdpkit.utils.logging import (
    TRACE,
    JSONFormatter,
    get_logger,
    is_logging_configured,
    setup_logging,
)


def make_record(level: int = logging.INFO, msg: str = "Test message", exc_info=None):
    return logging.LogRecord(
        name="pbdpkit.test",
        level=level,
        pathname="test.py",
        lineno=10,
        msg=msg,
        args=(),
        exc_info=exc_info,
    )


class TestJSONFormatter:
    """Test JSONFormatter for structured logging."""

    def test_format_basic_message(self) -> None:
        """Test formatting a basic log message as JSON."""
        data = json.loads(JSONFormatter().format(make_record()))

        assert data["level"] == "INFO"
        assert data["logger"] == "pbdpkit.test"
        assert data["message"] == "Test message"
        assert "timestamp" in data
        assert "extra" not in data

    def test_format_with_extra_fields(self) -> None:
        """Test that fields passed through extra= are kept."""
        record = make_record(logging.DEBUG)
        record.seed = 7
        record.suite = "palm"

        data = json.loads(JSONFormatter().format(record))

        assert data["extra"] == {"seed": 7, "suite": "palm"}

    def test_format_with_exception(self) -> None:
        """Test formatting with exception info."""
        try:
            raise ValueError("Test error")
        except ValueError:
            exc_info = sys.exc_info()

        data = json.loads(JSONFormatter().format(make_record(logging.ERROR, exc_info=exc_info)))

        assert data["level"] == "ERROR"
        assert "ValueError: Test error" in data["exception"]


class TestSetupLogging:
    """Test setup_logging function."""

    def teardown_method(self) -> None:
        """Clean up logging handlers after each test."""
        logger = logging.getLogger("pbdpkit")
        logger.handlers.clear()
        logger.setLevel(logging.NOTSET)

    def test_setup_logging_default(self) -> None:
        """Test setup_logging with defaults."""
        setup_logging()

        logger = logging.getLogger("pbdpkit")
        assert logger.level == logging.INFO
        assert len(logger.handlers) == 1
        assert logger.propagate is False

    def test_console_goes_to_stderr(self) -> None:
        """Test that console logs never reach standard output."""
        stdout, stderr = StringIO(), StringIO()
        with patch.object(sys, "stdout", stdout), patch.object(sys, "stderr", stderr):
            setup_logging(enable_colors=False)
            get_logger("pbdpkit.test").info("fitting")

        assert stdout.getvalue() == ""
        assert "fitting" in stderr.getvalue()

    def test_trace_level(self) -> None:
        """Test the TRACE level below DEBUG."""
        stream = StringIO()
        with patch.object(sys, "stderr", stream):
            setup_logging(level=TRACE, enable_colors=False)
            get_logger("pbdpkit.test").trace("event 3: kill")  # type: ignore[attr-defined]

        assert TRACE < logging.DEBUG
        assert logging.getLevelName(TRACE) == "TRACE"
        assert "TRACE" in stream.getvalue()
        assert "event 3: kill" in stream.getvalue()

    def test_trace_filtered_at_debug(self) -> None:
        """Test that TRACE messages are dropped at DEBUG."""
        stream = StringIO()
        with patch.object(sys, "stderr", stream):
            setup_logging(level=logging.DEBUG, enable_colors=False)
            get_logger("pbdpkit.test").trace("hidden")  # type: ignore[attr-defined]

        assert "hidden" not in stream.getvalue()

    def test_setup_logging_file_handler_text(self, tmp_path: Path) -> None:
        """Test setup_logging with text file handler."""
        log_file = tmp_path / "logs" / "run.log"
        setup_logging(log_file=log_file, log_format="text")

        logger = logging.getLogger("pbdpkit")
        assert len(logger.handlers) == 2

        get_logger("pbdpkit.test").info("Test message")
        for handler in logger.handlers:
            handler.flush()

        content = log_file.read_text()
        assert "Test message" in content
        assert "INFO" in content

    def test_setup_logging_file_handler_json(self, tmp_path: Path) -> None:
        """Test setup_logging with JSON file handler."""
        log_file = tmp_path / "run.jsonl"
        setup_logging(log_file=log_file, log_format="json")

        get_logger("pbdpkit.test").info("JSON test message", extra={"seed": 42})
        for handler in logging.getLogger("pbdpkit").handlers:
            handler.flush()

        data = json.loads(log_file.read_text().strip())
        assert data["message"] == "JSON test message"
        assert data["extra"]["seed"] == 42

    def test_setup_logging_no_colors(self) -> None:
        """Test setup_logging without colors."""
        setup_logging(enable_colors=False)

        from rich.logging import RichHandler

        assert not isinstance(logging.getLogger("pbdpkit").handlers[0], RichHandler)

    def test_setup_logging_removes_existing_handlers(self) -> None:
        """Test that setup_logging removes existing handlers."""
        logger = logging.getLogger("pbdpkit")
        logger.addHandler(logging.StreamHandler())

        setup_logging()

        assert len(logger.handlers) == 1


class TestGetLogger:
    """Test get_logger and is_logging_configured."""

    def teardown_method(self) -> None:
        """Clean up logging handlers after each test."""
        logging.getLogger("pbdpkit").handlers.clear()

    def test_get_logger_inherits_from_pbdpkit(self) -> None:
        """Test that module loggers sit under the package logger."""
        setup_logging(level=logging.DEBUG)

        child = get_logger("pbdpkit.bounds")

        assert child.level == logging.NOTSET
        assert child.parent is logging.getLogger("pbdpkit")

    def test_is_logging_configured(self) -> None:
        """Test that is_logging_configured reflects setup."""
        logging.getLogger("pbdpkit").handlers.clear()
        assert is_logging_configured() is False

        setup_logging()

        assert is_logging_configured() is True
