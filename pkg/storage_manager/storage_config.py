# storage_manager\storage_config.py

import os
from src.configuration.config_loader import config
from storage_manager.storage_backend import LocalStorage


def get_storage() -> LocalStorage:
    base_dir = os.getenv("SESSIONS_DIR", config.get_paths().sessions_dir)
    return LocalStorage(base_dir=base_dir)


# Global storage object
storage = get_storage()
