import numpy as np
import pytest
from loguru import logger


@pytest.fixture(autouse=True)
def quiet_logs():
    logger.remove()
    logger.add(lambda _: None, level="WARNING")
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
