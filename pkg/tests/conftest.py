"""
Общие фикстуры тестов.
"""
import random

import pytest

from config import Config
from database import dispose_engines


@pytest.fixture
def rng():
    return random.Random(20240517)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    """Отдельный каталог кэша на каждый тест."""
    path = tmp_path / "cache"
    monkeypatch.setenv("QINSTANTON_CACHE", str(path))
    monkeypatch.setattr(Config, "LOG_DIR", str(tmp_path / "logs"))
    yield str(path)
    dispose_engines()
