"""Loguru setup for the qna CLI.

stdout carries result documents, so every sink writes to stderr or a file.
Records are bound to the running command; the file sink keeps the bound
fields (order, leaves, elapsed, ...) for later inspection of long runs.
"""

from __future__ import annotations

import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<magenta>{extra[command]}</magenta> | "
    "<level>{message}</level>"
)

DEBUG_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<magenta>{extra[command]}</magenta> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)

FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[command]} | "
    "{name}:{function}:{line} | {message} | {extra}"
)


def setup_logging(verbose: bool = False, log_file: Path | str | None = None) -> None:
    """Route logs to stderr, and to ``log_file`` at DEBUG when given.

    Without ``verbose`` only warnings reach the console; the algorithm
    modules log their per-degree and per-leaf progress at DEBUG.
    """
    from . import __version__

    logger.remove()
    logger.configure(extra={"command": "qna", "version": __version__})
    logger.add(
        sys.stderr,
        format=DEBUG_FORMAT if verbose else CONSOLE_FORMAT,
        level="DEBUG" if verbose else "WARNING",
        colorize=True,
        backtrace=verbose,
        diagnose=verbose,
    )
    if log_file is not None:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            path,
            format=FILE_FORMAT,
            level="DEBUG",
            rotation="10 MB",
            retention=5,
            backtrace=True,
            diagnose=False,
        )


def command_logger(command: str, **fields: Any) -> Any:
    """Logger bound to a CLI command name."""
    return logger.bind(command=command, **fields)


@contextmanager
def timed(log: Any, stage: str, **fields: Any) -> Iterator[dict[str, Any]]:
    """Log the wall time of ``stage``; the yielded dict adds fields to the record."""
    extra: dict[str, Any] = dict(fields)
    start = time.perf_counter()
    yield extra
    log.info(
        "{stage} finished in {elapsed:.3f}s",
        stage=stage,
        elapsed=time.perf_counter() - start,
        **extra,
    )


def log_failure(log: Any, error: BaseException, exit_code: int) -> None:
    """Record a failure that ends the command with ``exit_code``."""
    log.error(
        "{error_type}: {error} (exit code {exit_code})",
        error_type=type(error).__name__,
        error=str(error),
        exit_code=exit_code,
    )


def disable_logging() -> None:
    """Silence everything below CRITICAL (used by the test suite)."""
    logger.remove()
    logger.configure(extra={"command": "qna"})
    logger.add(sys.stderr, level="CRITICAL", format=CONSOLE_FORMAT)
