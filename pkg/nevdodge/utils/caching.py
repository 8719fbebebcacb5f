"""
Memoisation of expensive numerical results (LU factorizations, assembled
kernel matrices) keyed by the md5 of the pickled arguments.
"""

import functools
import hashlib
import logging
import os
import pickle
import time
from collections import OrderedDict
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from nevdodge.constants import CACHE_PATH

log = logging.getLogger(__name__)


def _normalise(arg):
    """Arrays hash by dtype, shape and raw bytes so equal data gives equal keys."""
    if isinstance(arg, np.ndarray):
        return ("ndarray", arg.dtype.str, arg.shape, arg.tobytes())
    return arg


def cache(
    ttl: int = -1,
    min_memory_time: float = 0.0,
    min_disk_time: float = float("inf"),
    directory: Path = CACHE_PATH,
    exclude: Optional[dict] = None,
    should_cache: Optional[Callable] = None,
    maxsize: int = 32,
) -> Callable:
    """Decorator caching results in memory or on disk.

    A call taking at least ``min_memory_time`` and less than ``min_disk_time``
    seconds is kept in a bounded in-memory store (least recently used entries
    are evicted beyond ``maxsize``). A call taking at least ``min_disk_time``
    seconds is pickled into ``directory``. Entries expire after ``ttl``
    seconds; a negative ``ttl`` never expires.

    Args:
        ttl (int): Time to live in seconds
        min_memory_time (float): Minimum run time to cache in memory
        min_disk_time (float): Minimum run time to cache on disk
        directory (Path): Directory of the pickle files
        exclude (dict): ``args`` (positions) and ``kwargs`` (names) left out
            of the cache key
        should_cache (callable): receives the result and the call arguments,
            returns whether to store the result
        maxsize (int): Maximum number of in-memory entries

    Returns:
        callable: Decorated function
    """

    if exclude is None:
        exclude = {}

    def compute_key(func_name, args, kwargs):
        kept_args = [
            _normalise(arg)
            for i, arg in enumerate(args)
            if i not in exclude.get("args", [])
        ]
        kept_kwargs = {
            name: _normalise(value)
            for name, value in sorted(kwargs.items())
            if name not in exclude.get("kwargs", [])
        }
        md5sum = hashlib.md5()
        md5sum.update(pickle.dumps((func_name, kept_args, kept_kwargs)))
        return md5sum.hexdigest()

    def should_use_file_cache(filepath: Path) -> bool:
        try:
            stats = os.stat(filepath)
        except FileNotFoundError:
            return False
        if 0 <= ttl <= int(time.time() - stats.st_mtime):
            os.unlink(filepath)
            return False
        return True

    def decorator(fn: Callable) -> Callable:
        memory_cache: OrderedDict = OrderedDict()

        def get_from_memory_cache(key):
            entry = memory_cache.get(key)
            if entry is None:
                return None, False
            inserted_at, value = entry
            if 0 <= ttl <= time.time() - inserted_at:
                del memory_cache[key]
                return None, False
            memory_cache.move_to_end(key)
            return value, True

        def decorated(*args, **kwargs):
            key = compute_key(fn.__qualname__, args, kwargs)

            value, cached = get_from_memory_cache(key)
            if cached:
                return value

            filepath = Path(directory) / f"{key}.pkl"
            if min_disk_time != float("inf") and should_use_file_cache(filepath):
                with open(filepath, "rb") as f:
                    return pickle.load(f)

            start = time.time()
            result = fn(*args, **kwargs)
            elapsed = time.time() - start

            if should_cache is not None and not should_cache(result, *args, **kwargs):
                return result

            if min_memory_time <= elapsed < min_disk_time:
                memory_cache[key] = (time.time(), result)
                while len(memory_cache) > maxsize:
                    memory_cache.popitem(last=False)
            elif elapsed >= min_disk_time:
                os.makedirs(directory, 0o755, exist_ok=True)
                with open(filepath, "wb") as f:
                    pickle.dump(result, f)
                log.debug("cached %s on disk as %s", fn.__qualname__, filepath.name)
            return result

        decorated.cache_clear = memory_cache.clear
        return functools.update_wrapper(decorated, fn)

    return decorator
