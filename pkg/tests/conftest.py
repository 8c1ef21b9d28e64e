import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.experiments.config import SEED_ENV, config_from_mapping  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def make_config(tmp_path):
    """Small experiment configs writing below tmp_path"""

    def build(**values):
        base = {"n_points": 16, "m_max": 256, "chunk_size": 8, "out": str(tmp_path / "run")}
        base.update(values)
        return config_from_mapping(base)

    return build
