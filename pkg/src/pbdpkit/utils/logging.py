"""Logging configuration for pbdpkit.

Console output goes to standard error (rich when attached to a terminal) so that
JSON and CSV written to standard output stay machine-readable. An optional file
handler writes either plain text or JSON lines. A custom TRACE level (5) carries
per-event simulation diagnostics.
"""

import json
import logging
import sys
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.logging import RichHandler
from rich.text import Text

TRACE = 5
logging.addLevelName(TRACE, "TRACE")

ROOT_LOGGER = "pbdpkit"

_logging_start_time: float | None = None

# Attributes every LogRecord carries; anything else came in through ``extra=``.
_STANDARD_FIELDS = frozenset(
    {
        "name",
        "msg",
        "args",
        "created",
        "filename",
        "funcName",
        "levelname",
        "levelno",
        "lineno",
        "module",
        "msecs",
        "message",
        "pathname",
        "process",
        "processName",
        "relativeCreated",
        "thread",
        "threadName",
        "taskName",
        "exc_info",
        "exc_text",
        "stack_info",
        "elapsed_time",
    }
)


class RelativeTimeFormatter(logging.Formatter):
    """Formatter that prefixes the seconds elapsed since logging started."""

    def format(self, record: logging.LogRecord) -> str:
        record.elapsed_time = f"+{record.relativeCreated / 1000:6.2f}s"
        return super().format(record)


class RelativeTimeRichHandler(RichHandler):
    """RichHandler showing elapsed time (+X.XXs) instead of wall clock time.

    Long Monte Carlo runs are easier to follow with relative timestamps.
    """

    def get_level_text(self, record: logging.LogRecord) -> Text:
        global _logging_start_time
        if _logging_start_time is None:
            _logging_start_time = record.created

        elapsed = record.created - _logging_start_time
        time_text = Text(f"+{elapsed:6.2f}s", style="log.time")
        return time_text + Text(" ") + super().get_level_text(record)


def trace(self: logging.Logger, message: str, *args: Any, **kwargs: Any) -> None:
    """Log a message with severity 'TRACE' on this logger."""
    if self.isEnabledFor(TRACE):
        self._log(TRACE, message, args, **kwargs)


logging.Logger.trace = trace  # type: ignore[attr-defined]


class JSONFormatter(logging.Formatter):
    """Format log records as one JSON object per line.

    Example output:
        {"timestamp": "2025-11-03T14:30:45.123+00:00", "level": "INFO",
         "logger": "pbdpkit.api", "message": "Fitting bernoulli model",
         "extra": {"seed": 7}}
    """

    def format(self, record: logging.LogRecord) -> str:
        """Format a log record as a JSON string.

        Args:
            record: Log record to format

        Returns:
            JSON string representing the log record
        """
        log_data: dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        extra_fields = {
            key: value
            for key, value in record.__dict__.items()
            if key not in _STANDARD_FIELDS and not key.startswith("_")
        }
        if extra_fields:
            log_data["extra"] = extra_fields

        return json.dumps(log_data, default=str)


def setup_logging(
    level: int = logging.INFO,
    log_file: Path | None = None,
    log_format: str = "text",
    enable_colors: bool = True,
) -> None:
    """Configure logging for the whole pbdpkit package.

    Call once at startup (the CLI does; the API does it lazily when nothing
    is configured yet).

    Args:
        level: Logging level (logging.DEBUG, logging.INFO, TRACE, ...)
        log_file: Optional path of a log file written in addition to the console
        log_format: Format for file output ("text" or "json")
        enable_colors: Use rich console output when standard error is a terminal

    Example:
        >>> from pbdpkit.utils.logging import setup_logging
        >>> setup_logging(level=logging.DEBUG, log_file=Path("sweep.log"), log_format="json")
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    logger.handlers.clear()
    logger.propagate = False

    console_handler: logging.Handler
    if enable_colors and sys.stderr.isatty():
        console_handler = RelativeTimeRichHandler(
            console=Console(file=sys.stderr, force_terminal=True),
            show_time=False,
            show_path=True,
            rich_tracebacks=True,
            markup=False,
        )
    else:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(
            RelativeTimeFormatter(fmt="%(elapsed_time)s  %(name)-24s  %(levelname)-8s  %(message)s")
        )

    console_handler.setLevel(level)
    logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
        file_handler.setLevel(min(level, logging.DEBUG))
        if log_format == "json":
            file_handler.setFormatter(JSONFormatter())
        else:
            file_handler.setFormatter(
                logging.Formatter(
                    fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
        logger.addHandler(file_handler)


def get_logger(name: str) -> logging.Logger:
    """Get a module logger under the pbdpkit namespace.

    Args:
        name: Module name, typically __name__

    Returns:
        Logger instance for the module
    """
    return logging.getLogger(name)


def is_logging_configured() -> bool:
    """Check whether setup_logging() has attached handlers yet."""
    return len(logging.getLogger(ROOT_LOGGER).handlers) > 0
