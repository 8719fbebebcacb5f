"""

Project : nevdodge
Topic   : info_logger
Desc    : timestamped progress lines for CLI runs and batch scripts.

"""

# Import python modules
import datetime
import sys
import time
from contextlib import contextmanager
from typing import Iterator

_START = time.perf_counter()


def print_info_log(msg: str, category: str) -> None:

    """
    Print a progress line on stderr, stdout carries command output.

    Format: ``2026-01-01 12:00:00 (+12.3s) --- [ SCAN ] --- msg``,
    the offset counting from import of this module.
    """

    now_time = datetime.datetime.now()
    elapsed = time.perf_counter() - _START
    msg_out = (
        f"{now_time:%Y-%m-%d %H:%M:%S} (+{elapsed:.1f}s)"
        f" --- [ {category.upper()} ] --- {msg}"
    )
    print(msg_out, file=sys.stderr)


@contextmanager
def stage(name: str, category: str = "progress") -> Iterator[None]:
    """Log the start and the wall time of a block."""
    print_info_log(f"{name} started", category)
    tic = time.perf_counter()
    yield
    print_info_log(f"{name} finished in {time.perf_counter() - tic:.1f}s", category)
