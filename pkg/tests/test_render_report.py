import json

import numpy as np
import pandas as pd
import pytest

from nevdodge.tabulate.render_report import jump_table, render_json, round_float, write_csv, write_json


@pytest.mark.parametrize(
    "value, digits, rounded",
    [(0.1, 17, 0.1), (2.0, 17, 2.0), (1 / 3, 4, 0.3333), (123456.0, 3, 123000.0), (np.inf, 17, None), (np.nan, 17, None)],
)
def test_round_float(value, digits, rounded):
    assert round_float(value, digits) == rounded


def test_render_json_is_canonical():
    payload = {"b": [1, 2.5], "a": {"z": True, "y": None}, "c": np.float64(3.0), "d": 1 + 2j, "e": np.inf}
    text = render_json(payload)
    assert text == render_json(dict(reversed(list(payload.items()))))
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"a": {"y": None, "z": True}, "b": [1, 2.5], "c": 3.0, "d": [1.0, 2.0], "e": None}


def test_render_json_layout():
    payload = {"lambda": np.float64(1 / 3), "steps": np.int64(2), "ok": np.bool_(True)}
    assert render_json(payload, digits=6) == '{\n  "lambda": 0.333333,\n  "ok": true,\n  "steps": 2\n}\n'
    assert render_json({"x": []}) == '{\n  "x": []\n}\n'


def test_write_files(tmp_path):
    path = write_json({"x": np.arange(3)}, tmp_path / "deep" / "out.json")
    assert json.loads(path.read_text()) == {"x": [0, 1, 2]}
    frame = pd.DataFrame({"lambda": [0.1, 3.0]})
    csv = write_csv(frame, tmp_path / "out.csv")
    assert csv.read_text() == "lambda\n0.10000000000000001\n3\n"


def test_jump_table():
    suite = {"jumps": [{"density": "one", "single_dnu_jump": 0.0, "double_value_jump": 0.0}]}
    assert list(jump_table(suite).columns) == ["density", "single_dnu_jump", "double_value_jump"]
