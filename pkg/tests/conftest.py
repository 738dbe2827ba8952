import logging
import math

import numpy as np
import pytest

from ehcap import export
from ehcap.geometry import ApproximantParams

SQRT27 = 3 * math.sqrt(3)
I8_THRESHOLD = 4 * math.pi * (math.sqrt(109) - 7) / 5


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    """Keep the result cache out of the real home directory."""
    monkeypatch.setattr(export, "_CACHE_DIR", tmp_path / "cache")


@pytest.fixture(autouse=True)
def _reset_logging():
    """CLI runs install a RichHandler and stop propagation; undo that for caplog."""
    yield
    logger = logging.getLogger("ehcap")
    logger.handlers.clear()
    logger.setLevel(logging.NOTSET)
    logger.propagate = True


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[10, 50])
def approximant(request):
    return ApproximantParams(request.param)
