import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session", autouse=True)
def _cache_dir(tmp_path_factory):
    """Keep the representative cache inside the test session."""
    old = os.environ.get("THETADEL_CACHE_DIR")
    os.environ["THETADEL_CACHE_DIR"] = str(tmp_path_factory.mktemp("cache"))
    yield
    if old is None:
        os.environ.pop("THETADEL_CACHE_DIR", None)
    else:
        os.environ["THETADEL_CACHE_DIR"] = old
