"""Shared fixtures"""

import numpy as np
import pytest

from app.config import get_settings
from app.protocol import ProtocolConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def canonical() -> ProtocolConfig:
    return ProtocolConfig.canonical(g=0.6, theta=np.pi / 2)


@pytest.fixture
def fresh_settings():
    """Re-read settings from the environment for the duration of a test"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
