import sys
from pathlib import Path
from typing import Optional

from loguru import logger

# --- Formats ---
SIMPLE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level} | {name} | {process} | {thread.name} | {message}"
ERROR_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level} | {name} | {process} | {thread.name} | {file.path}:{line} | {function} | {message}"

APP_LOG = "app.log"
ERROR_LOG = "error.log"

# stdout carries command results; logs go to stderr
logger.remove()
_console_id = logger.add(sys.stderr, level="WARNING", format=SIMPLE_FORMAT)


def setup_logging(level: str = "INFO", log_dir: Optional[Path] = None) -> None:
    """Install the console sink at `level` and, with `log_dir`, rotating files."""
    global _console_id
    logger.remove()
    _console_id = logger.add(sys.stderr, level=level.upper(), format=SIMPLE_FORMAT)

    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        logger.add(
            str(log_dir / APP_LOG),
            level="INFO",
            format=SIMPLE_FORMAT,
            rotation="00:00",
            retention="14 days",
            encoding="utf8",
        )
        logger.add(
            str(log_dir / ERROR_LOG),
            level="ERROR",
            format=ERROR_FORMAT,
            rotation="00:00",
            retention="30 days",
            encoding="utf8",
            backtrace=True,
        )


__all__ = ("logger", "setup_logging")
