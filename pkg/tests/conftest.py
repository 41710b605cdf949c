import json

import numpy as np
import pytest

from episodic_sg.catalog import matching_pennies, switching_controller_game
from episodic_sg.game_model import game_to_document


@pytest.fixture
def pennies():
    return matching_pennies()


@pytest.fixture
def switching_controller():
    return switching_controller_game()


@pytest.fixture
def pennies_doc(pennies):
    return json.dumps(game_to_document(pennies))


def assert_distribution(vec):
    vec = np.asarray(vec)
    assert np.all(vec >= 0)
    assert abs(vec.sum() - 1.0) < 1e-12
