# src/utils/common_utils.py

import math
import os
from typing import Any

import numpy as np

from src.common.exception.custom_exception import CustomException


def ensure_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
        return path
    except Exception as e:
        raise CustomException(f"Failed to create directory {path}", e)


def to_builtin(value: Any) -> Any:
    """Turn numpy scalars and tuples into JSON-friendly Python values; inf and nan become strings."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, dict):
        return {k: to_builtin(v) for k, v in value.items()}
    return value
