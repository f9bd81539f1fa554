import os

import pytest

from dehnscan.geometry import load_gluing_system

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "dehnscan", "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURE_DIR, name)


@pytest.fixture(scope="session")
def m004():
    return load_gluing_system(fixture_path("m004.json"))


@pytest.fixture(scope="session")
def whitehead():
    return load_gluing_system(fixture_path("whitehead.json"))


@pytest.fixture(scope="session")
def rrrl():
    return load_gluing_system(fixture_path("ptorus_rrrl.json"))
