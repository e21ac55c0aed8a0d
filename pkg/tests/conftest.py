from __future__ import annotations

import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # keep CLI runs away from the user's cache
    monkeypatch.setenv("MATEX_CACHE", str(tmp_path / "cache.jsonl"))
