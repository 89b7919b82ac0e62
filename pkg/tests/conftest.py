from pathlib import Path

import numpy as np
import pytest

from portmoea.instance import load_frontier, load_instance

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def synth31():
    return load_instance(DATA / "synth31.port")


@pytest.fixture(scope="session")
def synth31_front():
    return load_frontier(DATA / "synth31.ef")


@pytest.fixture(scope="session")
def synth10():
    return load_instance(DATA / "synth10.port")


@pytest.fixture(scope="session")
def synth5():
    return load_instance(DATA / "synth5.port")


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
