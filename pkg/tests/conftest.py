import functools
import json

import pytest
from hypothesis import HealthCheck, settings

from dualis.models import build_model

settings.register_profile(
    "exact",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


@functools.lru_cache(maxsize=None)
def _cached(key: str):
    return build_model(json.loads(key))


def model_for(spec: dict):
    """Build once per session; models cache their cochain complexes and Hecke data."""
    return _cached(json.dumps(spec, sort_keys=True))


CIRCLE = {"family": "torus", "parameters": {"n": 1}}
CIRCLE_DOUBLING = {"family": "torus", "parameters": {"n": 1}, "hecke_elements": [{"matrix": [[2]]}]}
TORUS2 = {"family": "torus", "parameters": {"n": 2}}
GAMMA11 = {
    "family": "modular",
    "parameters": {"level": 11, "weight": 2},
    "hecke_elements": [{"p": 2}],
    "transfer": {"level": 22},
}


@pytest.fixture
def circle():
    return model_for(CIRCLE)


@pytest.fixture
def doubling():
    return model_for(CIRCLE_DOUBLING)


@pytest.fixture
def torus2():
    return model_for(TORUS2)


@pytest.fixture
def gamma11():
    return model_for(GAMMA11)


# one model per family and a few coefficient systems; shared by the structural tests
STRUCTURAL_SPECS = {
    "circle": CIRCLE,
    "circle-char3": {"family": "torus", "parameters": {"n": 1}, "rep": {"translations": [[[3]]]}},
    "torus2": TORUS2,
    "torus2-unipotent": {
        "family": "torus",
        "parameters": {"n": 2},
        "rep": {"translations": [[[1, 1], [0, 1]], [[1, 0], [0, 1]]]},
    },
    "torus3": {"family": "torus", "parameters": {"n": 3}},
    "disk3": {"family": "finite_rotation", "parameters": {"order": 3}},
    "disk4-rotation": {"family": "finite_rotation", "parameters": {"order": 4}, "rep": {"type": "rotation"}},
    "level1-k4": {"family": "modular", "parameters": {"level": 1, "weight": 4}},
    "level11-k2": {"family": "modular", "parameters": {"level": 11, "weight": 2}},
}
