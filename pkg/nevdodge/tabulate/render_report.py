"""
Render run reports: CSV tables through pandas and JSON documents with every
float rounded to a fixed number of significant digits and keys sorted, so
identical runs produce byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from nevdodge.constants import FLOAT_DIGITS

log = logging.getLogger(__name__)


def round_float(value: float, digits: int = FLOAT_DIGITS) -> Optional[float]:
    """``value`` rounded to ``digits`` significant digits; None when not finite."""
    if not np.isfinite(value):
        return None
    return float(format(float(value), f".{digits}g"))


def _plain(obj: Any, digits: int) -> Any:
    """Builtin JSON types with numpy values unwrapped and floats rounded."""
    if isinstance(obj, dict):
        return {str(key): _plain(value, digits) for key, value in obj.items()}
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return [_plain(item, digits) for item in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_float(obj.real, digits), round_float(obj.imag, digits)]
    if isinstance(obj, (float, np.floating)):
        return round_float(obj, digits)
    if obj is None:
        return None
    return str(obj)


def render_json(payload: Any, digits: int = FLOAT_DIGITS, indent: int = 2) -> str:
    """
    JSON text of ``payload`` with floats at ``digits`` significant digits.
    """

    return json.dumps(_plain(payload, digits), sort_keys=True, indent=indent, allow_nan=False) + "\n"


def write_json(payload: Any, file_name: str | Path, digits: int = FLOAT_DIGITS) -> Path:
    path = Path(file_name)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(render_json(payload, digits))
    log.debug("wrote %s", path)
    return path


def write_csv(frame: pd.DataFrame, file_name: str | Path, digits: int = FLOAT_DIGITS) -> Path:
    path = Path(file_name)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=f"%.{digits}g", lineterminator="\n")
    log.debug("wrote %s (%d rows)", path, len(frame))
    return path


def jump_table(suite: dict) -> pd.DataFrame:
    """
    One row per density of a jump-relation suite.
    """

    return pd.DataFrame(suite["jumps"])
