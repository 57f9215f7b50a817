import os
import pathlib

import pytest

from deplab.depsearch.search import SearchConfig, exhaustive_search
from deplab.orbits import generate_orbit, minimize_frame_potential, sample_eigenspace
from deplab.phasespace import DimensionContext

DATA = pathlib.Path(__file__).parent / "data"
os.environ.setdefault("DEPLAB_WORKERS", "1")


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def orbit6():
    return generate_orbit(sample_eigenspace(DimensionContext(6), "1", 1))


@pytest.fixture(scope="session")
def search6(orbit6):
    return exhaustive_search(orbit6, SearchConfig(workers=1))


@pytest.fixture(scope="session")
def sets6(search6):
    return search6.all_sets()[0]


@pytest.fixture(scope="session")
def sic6():
    res = minimize_frame_potential(DimensionContext(6), "1", seed=1)
    assert res.is_sic
    return res.fiducial


@pytest.fixture(scope="session")
def sic_orbit6(sic6):
    return generate_orbit(sic6)
