from __future__ import annotations

import numpy as np
import pytest

from rcthermo.config import Config


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep config.ini writes away from the real home directory."""
    config_dir = tmp_path / "config"
    monkeypatch.setattr(Config, "CONFIG_DIR", config_dir)
    monkeypatch.setattr(Config, "CONFIG_FILE", config_dir / "config.ini")
    for name in ("RCTHERMO_TOL", "RCTHERMO_JOBS", "RCTHERMO_LAMB_SHIFT"):
        monkeypatch.delenv(name, raising=False)
    return config_dir
