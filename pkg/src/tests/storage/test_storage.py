import json

import numpy as np
import pytest

from storage_manager.file_manager import load_json_document, save_report
from storage_manager.session_manager import get_next_session_number, session_key
from storage_manager.storage_backend import LocalStorage, dumps_report
from src.utils.common_utils import to_builtin


def test_session_numbers_skip_foreign_folders(tmp_path):
    route = tmp_path / "dilate"
    for name in ("session_1", "session_4", "session_x", "notes"):
        (route / name).mkdir(parents=True)
    assert get_next_session_number("dilate", base_dir=tmp_path) == 5
    assert get_next_session_number("verify", base_dir=tmp_path) == 1
    assert session_key("dilate", 5) == "dilate/session_5/report.json"


def test_local_storage_round_trip(tmp_path):
    storage = LocalStorage(base_dir=tmp_path)
    path = storage.save_json("flip/session_1/report.json", {"verdict": "pass"})
    assert path == tmp_path / "flip" / "session_1" / "report.json"
    assert path.read_text().endswith("\n")
    assert json.loads(path.read_text()) == {"verdict": "pass"}


def test_non_finite_values_are_rejected():
    with pytest.raises(ValueError):
        dumps_report({"residual": float("nan")})


def test_report_text_keeps_key_order():
    text = dumps_report({"command": "flip", "verdict": "pass"})
    assert text.index("command") < text.index("verdict")


def test_save_report_to_explicit_path(tmp_path):
    out = tmp_path / "nested" / "report.json"
    assert save_report("flip", {"verdict": "fail"}, out) == out
    assert json.loads(out.read_text()) == {"verdict": "fail"}
    assert load_json_document(out) == {"verdict": "fail"}


def test_non_finite_residuals_are_written_as_strings():
    report = to_builtin({"residual": float("inf"), "values": (np.float64("nan"), 1.0)})
    assert report == {"residual": "inf", "values": ["nan", 1.0]}
    assert json.loads(dumps_report(report))["residual"] == "inf"
