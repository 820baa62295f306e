import json
from pathlib import Path

import numpy as np
import pytest

from jumpwass.models.gaussian import Gaussian
from jumpwass.models.system import JumpLinearSystem, MarkovLaw

REPO_ROOT = Path(__file__).resolve().parents[1]
SHIPPED_CONFIG = REPO_ROOT / "configs" / "markov_two_mode.json"

A1 = [[0.7, 0.0], [0.0, 1.0]]
A2 = [[1.0, 0.0], [0.0, 0.85]]
PI0 = [0.5, 0.5]
P = [[0.75, 0.25], [0.2, 0.8]]
MU0 = [5.0, 5.0]
SIGMA0 = [[0.1, 0.0], [0.0, 0.1]]


@pytest.fixture
def system() -> JumpLinearSystem:
    return JumpLinearSystem(modes=(A1, A2))


@pytest.fixture
def markov_law() -> MarkovLaw:
    return MarkovLaw(pi0=PI0, transition=P)


@pytest.fixture
def init() -> Gaussian:
    return Gaussian(mean=MU0, cov=SIGMA0)


@pytest.fixture
def shipped_config_path() -> Path:
    return SHIPPED_CONFIG


@pytest.fixture
def config_dict() -> dict:
    """Shipped example with a lighter Monte Carlo section"""
    data = json.loads(SHIPPED_CONFIG.read_text(encoding="utf-8"))
    data["mc"] = {"num_trajectories": 3000, "seed": 7, "horizon": 10, "law_mode": "chain"}
    return data


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write

