import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20240817)


def capitalized(name):
    """Map an algebra basis name to the matching frame field key."""
    if name.startswith("t"):
        return "T" + name[1:]
    return name[0].upper() + name[1:]
