import os

import pytest

from model_core import Mode, ModelSpec, NondimParams, PredatorPreyParams, Variant

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep LV_GAME_* variables of the developer's shell out of the runs"""
    for name in list(os.environ):
        if name.startswith("LV_GAME_"):
            monkeypatch.delenv(name)


@pytest.fixture
def fixture_path():
    def path(name):
        return os.path.join(FIXTURES, name)
    return path


@pytest.fixture
def nondim():
    def make(a12, a21, mode=Mode.COMPETITIVE, rho=1.0):
        return ModelSpec(Variant.NONDIM, NondimParams(a12=a12, a21=a21, rho=rho, mode=mode))
    return make


@pytest.fixture
def predator_prey():
    return ModelSpec(Variant.PREDATOR_PREY, PredatorPreyParams(delta=1.0, epsilon=0.5, alpha=0.5, beta=0.25))
