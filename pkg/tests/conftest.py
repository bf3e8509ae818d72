import os

import numpy as np
import pytest


def pytest_collection_modifyitems(config, items):
    if os.getenv("TOFCS_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="slow benchmark; set TOFCS_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


