import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

RUN_SLOW_ENV = "FRECHET_COV_RUN_SLOW"


def pytest_collection_modifyitems(config, items) -> None:
    if os.getenv(RUN_SLOW_ENV) == "1":
        return
    skip_slow = pytest.mark.skip(reason=f"Monte Carlo check; set {RUN_SLOW_ENV}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
