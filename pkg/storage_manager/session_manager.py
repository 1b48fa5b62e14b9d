# storage_manager\session_manager.py

from pathlib import Path
from storage_manager.storage_config import storage


# ----------------------------
# Session Utilities
# ----------------------------
def get_next_session_number(route_name: str, base_dir: Path | None = None) -> int:
    """Compute the next session number based on existing session folders."""
    route_dir = Path(base_dir or storage.base) / route_name
    if not route_dir.exists():
        return 1

    numbers = []
    for d in route_dir.iterdir():
        if not (d.is_dir() and d.name.startswith("session_")):
            continue
        try:
            numbers.append(int(d.name.split("_")[1]))
        except (IndexError, ValueError):
            continue

    return max(numbers, default=0) + 1


def session_key(route_name: str, session_number: int, filename: str = "report.json") -> str:
    return f"{route_name}/session_{session_number}/{filename}"
