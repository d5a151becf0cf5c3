import pytest

from datagen import DgpSpec, generate
from utils.logger import Logger
from utils.numerics import RngStream


@pytest.fixture
def rng():
    return RngStream(0, ("tests",))


@pytest.fixture
def logger(tmp_path):
    return Logger(str(tmp_path / "logs"))


@pytest.fixture
def noiseless_linear():
    """tau(x) = x1, linear baseline, no outcome noise."""
    spec = DgpSpec("linear-heterogeneous", d=3, noise_sd=0.0)
    return generate(spec, 600, RngStream(0, ("noiseless-linear",)))


@pytest.fixture
def polynomial_dataset():
    spec = DgpSpec("polynomial-heterogeneous", d=3, noise_sd=0.5)
    return generate(spec, 400, RngStream(1, ("polynomial",)))


@pytest.fixture
def small_config_dict():
    return {
        'datasets': [
            {'id': 'lin', 'dgp': {'family': 'linear-heterogeneous', 'd': 3, 'noise_sd': 0.5}, 'n': 200},
        ],
        'seeds': [0],
        'bank': {'grid_size': 1, 'kinds': ['S', 'T', 'DR', 'R']},
        'selection': {
            'cv_folds': 3,
            'candidates': [{'family': 'linear'}, {'family': 'ridge', 'alpha': 1.0}],
        },
    }
