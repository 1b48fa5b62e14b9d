# storage_manager\storage_backend.py

import json
from pathlib import Path
from src.common.logging.logger import logger


def dumps_report(data: dict) -> str:
    """Stable JSON text: insertion-ordered keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


class StorageBackend:
    """Abstract base class for storage backends."""
    def save_json(self, key: str, data: dict) -> Path:
        raise NotImplementedError


class LocalStorage(StorageBackend):
    """Local filesystem storage."""
    def __init__(self, base_dir="sessions"):
        self.base = Path(base_dir)

    def _full_path(self, key: str) -> Path:
        return self.base / key

    def save_json(self, key: str, data: dict) -> Path:
        path = self._full_path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_report(data), encoding="utf-8")
        logger.info("Report saved", path=str(path))
        return path
