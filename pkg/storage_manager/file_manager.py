# storage_manager\file_manager.py

import json
from pathlib import Path
from typing import Any, Dict

from src.common.exception.dilation_exceptions import InvalidInput
from src.utils.common_utils import ensure_dir
from storage_manager.storage_backend import dumps_report
from storage_manager.storage_config import storage
from storage_manager.session_manager import get_next_session_number, session_key


# ----------------------------
# Input Documents
# ----------------------------
def load_json_document(path: str | Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise InvalidInput(f"input file not found: {path}", identity="input_file")
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"input file is not valid JSON: {path}", e, identity="input_file")


# ----------------------------
# Report Storage
# ----------------------------
def save_report(command: str, report: Dict[str, Any], out_path: str | Path | None = None) -> Path:
    """Write the report to `out_path`, or to sessions/<command>/session_<n>/report.json."""
    if out_path is not None:
        path = Path(out_path)
        ensure_dir(str(path.parent))
        path.write_text(dumps_report(report), encoding="utf-8")
        return path

    session_number = get_next_session_number(command)
    return storage.save_json(session_key(command, session_number), report)
