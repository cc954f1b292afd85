import pytest


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("ANSFD_SEED", raising=False)
    monkeypatch.delenv("ANSFD_LOG_LEVEL", raising=False)
