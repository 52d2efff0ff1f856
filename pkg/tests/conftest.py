import os
import sys
import tempfile

# Ledger and log file go to a throwaway directory before config is imported.
os.environ.setdefault("GRASSNET_DATA_DIR", tempfile.mkdtemp(prefix="grassnet-tests-"))
os.environ.pop("GRASSNET_DB_PATH", None)

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import numpy as np
import pytest

from core.lattice import Region
from engine.sampler import GeneralPositionSampler


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sampler():
    return GeneralPositionSampler()


@pytest.fixture
def unit_cube():
    return Region((1, 1, 1))


@pytest.fixture
def tmp_db(tmp_path):
    from db.db import Database
    return Database(str(tmp_path / "ledger.db"))
