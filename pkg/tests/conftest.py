import numpy as np
import pytest
from importlib import resources

from thzlink import AntennaState, FrequencyGrid, Room


@pytest.fixture(scope="session")
def preset_path(tmp_path_factory):
    """Filesystem path of the shipped meeting-room preset."""
    ref = resources.files("thzlink").joinpath("presets/meeting_room.cfg")
    target = tmp_path_factory.mktemp("preset") / "meeting_room.cfg"
    target.write_text(ref.read_text())
    return str(target)


@pytest.fixture
def grid1():
    return FrequencyGrid(140e9, 32e9, 1)


@pytest.fixture
def grid64():
    return FrequencyGrid(140e9, 32e9, 64)


@pytest.fixture
def empty_room():
    return Room.box(8.0, 5.0, 3.0)


@pytest.fixture
def omni():
    return AntennaState(0.0, 360.0)


def random_room(rng: np.random.Generator) -> Room:
    return Room.box(float(rng.uniform(3.0, 12.0)),
                    float(rng.uniform(3.0, 12.0)),
                    float(rng.uniform(2.2, 5.0)))


def random_point_inside(room: Room, rng: np.random.Generator, margin=0.2):
    return tuple(float(rng.uniform(margin, d - margin)) for d in room.dims)
