import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("REGPART_CACHE_DIR", str(tmp_path / "cache"))
    yield


def pytest_configure(config):
    os.environ.setdefault("NUMBA_CACHE_DIR", "/tmp/numba-cache")
