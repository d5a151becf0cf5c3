import logging
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from datagen.dataset import ObservationalDataset
from learners.nuisance import fit_nuisances, with_treatment
from models import (DEFAULT_EPSILON, DEFAULT_NUISANCE_CANDIDATES, DEFAULT_PROPENSITY_CANDIDATES, PropensityModel,
                    PropensitySpec, RegressorModel, RegressorSpec, SelectionBudget)
from utils.errors import ScoreError
from utils.numerics import RngStream, standardize

logger = logging.getLogger("CateBench.scores")


def nearest_opposite(X: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Index of each row's nearest neighbour in the opposite arm.

    Euclidean distance on standardized covariates; ties go to the lowest index.
    """
    W = np.asarray(W)
    if W.min() == W.max():
        raise ScoreError("matching needs both treatment arms in the validation split")
    Z, _, _ = standardize(X)
    distances = cdist(Z, Z, metric="sqeuclidean")
    distances[W[:, None] == W[None, :]] = np.inf
    return np.argmin(distances, axis=1)


@dataclass(frozen=True, eq=False)
class BoundContext:
    """Metric nuisances evaluated on one validation split.

    pi is the clipped P(W = 1 | x); mu0/mu1 come from the per-arm models,
    mu_x0/mu_x1 from the joint model at w = 0 / 1; match_y is the outcome of
    each row's opposite-arm nearest neighbour.
    """

    Y: np.ndarray
    W: np.ndarray
    pi: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray
    mu_x0: np.ndarray
    mu_x1: np.ndarray
    g: np.ndarray
    match_y: np.ndarray

    def __post_init__(self):
        n = None
        for f in fields(self):
            arr = np.asarray(getattr(self, f.name), dtype=float).ravel()
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise ScoreError(f"{f.name} has {arr.shape[0]} rows, expected {n}")
            object.__setattr__(self, f.name, arr)

    @property
    def n(self) -> int:
        return self.Y.shape[0]

    def subset(self, index) -> "BoundContext":
        index = np.asarray(index)
        return BoundContext(**{f.name: getattr(self, f.name)[index] for f in fields(self)})


@dataclass(frozen=True, eq=False)
class MetricContext:
    """Score-side nuisances, fit on the training split only."""

    pi_check: PropensityModel
    mu0_check: RegressorModel
    mu1_check: RegressorModel
    mu_xw_check: RegressorModel
    g_check: RegressorModel

    def bind(self, val: ObservationalDataset) -> BoundContext:
        X = val.X
        match = nearest_opposite(X, val.W)
        return BoundContext(
            Y=val.Y,
            W=val.W,
            pi=self.pi_check.predict(X),
            mu0=self.mu0_check.predict(X),
            mu1=self.mu1_check.predict(X),
            mu_x0=self.mu_xw_check.predict(with_treatment(X, 0)),
            mu_x1=self.mu_xw_check.predict(with_treatment(X, 1)),
            g=self.g_check.predict(X),
            match_y=val.Y[match],
        )


def fit_metric_context(train: ObservationalDataset,
                       candidates: Sequence[RegressorSpec] = DEFAULT_NUISANCE_CANDIDATES,
                       propensity_candidates: Sequence[PropensitySpec] = DEFAULT_PROPENSITY_CANDIDATES,
                       budget: Optional[SelectionBudget] = None,
                       rng: Optional[RngStream] = None,
                       epsilon: float = DEFAULT_EPSILON) -> MetricContext:
    """Select and fit pi, mu0, mu1, mu(x, w) and g(x) for the scores."""
    rng = rng or RngStream(0, ("metric",))
    nuis = fit_nuisances(train, ("S", "T", "R"), candidates, propensity_candidates, budget, rng, epsilon)
    logger.info("Metric context fitted on %d training rows", train.n)
    return MetricContext(
        pi_check=nuis.pi,
        mu0_check=nuis.mu0,
        mu1_check=nuis.mu1,
        mu_xw_check=nuis.mu_xw,
        g_check=nuis.m_x,
    )
