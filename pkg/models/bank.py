from typing import List

import numpy as np

from models.regressors import RegressorSpec
from utils.errors import ConfigError
from utils.numerics import log_grid

PENALTY_GRID = (-4, 5)
DEPTH_GRID = list(range(2, 11)) + [None]

SINGLETON_FAMILIES = ("linear", "linear-poly2-no-interaction", "linear-poly2-interaction")

# Penalty-gridded slots: (family, fixed hyperparameters). The sigmoid and RBF
# kernel ridges and the huber model occupy the three SVR slots.
PENALTY_SLOTS = (
    ("ridge", {}),
    ("kernel-ridge", {"kernel": "linear"}),
    ("lasso", {}),
    ("elastic-net", {}),
    ("kernel-ridge", {"kernel": "sigmoid"}),
    ("kernel-ridge", {"kernel": "rbf"}),
    ("huber", {}),
)
DEPTH_SLOTS = ("decision-tree", "random-forest", "gradient-boosting")


def depth_grid(grid_size: int) -> list:
    """Evenly spread subset of the depth list; all 10 depths once grid_size >= 10."""
    if grid_size >= len(DEPTH_GRID):
        return list(DEPTH_GRID)
    index = np.round(np.linspace(0, len(DEPTH_GRID) - 1, grid_size)).astype(int)
    return [DEPTH_GRID[i] for i in index]


def final_model_bank(grid_size: int = 10) -> List[RegressorSpec]:
    """3 linear singletons plus grid_size settings for each of the 10 gridded slots."""
    if grid_size < 1:
        raise ConfigError("grid_size must be >= 1")
    alphas = log_grid(PENALTY_GRID[0], PENALTY_GRID[1], grid_size)
    depths = depth_grid(grid_size)

    bank = [RegressorSpec.of(family) for family in SINGLETON_FAMILIES]
    for family, fixed in PENALTY_SLOTS:
        bank.extend(RegressorSpec.of(family, alpha=alpha, **fixed) for alpha in alphas)
    for family in DEPTH_SLOTS:
        bank.extend(RegressorSpec.of(family, max_depth=depth) for depth in depths)
    return bank
