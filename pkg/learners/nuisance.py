import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Set, Tuple

import numpy as np

from datagen.dataset import ObservationalDataset
from models import (DEFAULT_EPSILON, DEFAULT_NUISANCE_CANDIDATES, DEFAULT_PROPENSITY_CANDIDATES, PropensityModel,
                    PropensitySpec, RegressorModel, RegressorSpec, SelectionBudget, select_by_cv,
                    select_propensity_by_cv)
from utils.errors import EstimatorError
from utils.numerics import RngStream

logger = logging.getLogger("CateBench.learners")

REQUIRED_NUISANCES = {
    "S": {"mu_xw"},
    "projected-S": {"mu_xw"},
    "T": {"mu0", "mu1"},
    "X": {"mu0", "mu1", "pi"},
    "IPW": {"pi"},
    "DR": {"mu_xw", "pi"},
    "R": {"m_x", "pi"},
}
MIN_ARM_ROWS = 2


def with_treatment(X: np.ndarray, t) -> np.ndarray:
    """Append a treatment column (scalar or per-row) to X."""
    X = np.asarray(X, dtype=float)
    column = np.broadcast_to(np.asarray(t, dtype=float), (X.shape[0],))
    return np.column_stack([X, column])


@dataclass(frozen=True, eq=False)
class NuisanceSet:
    """Estimator-side nuisances, all fit on the training split."""

    mu_xw: Optional[RegressorModel] = None
    mu0: Optional[RegressorModel] = None
    mu1: Optional[RegressorModel] = None
    m_x: Optional[RegressorModel] = None
    pi: Optional[PropensityModel] = None

    def require(self, *names: str):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise EstimatorError(f"missing nuisance model(s): {', '.join(missing)}")
        return tuple(getattr(self, name) for name in names)

    def joint_plugin(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(mu(x, 0), mu(x, 1)) from the joint outcome model."""
        (mu_xw,) = self.require("mu_xw")
        return mu_xw.predict(with_treatment(X, 0)), mu_xw.predict(with_treatment(X, 1))


def required_nuisances(kinds: Iterable[str]) -> Set[str]:
    needed = set()
    for kind in kinds:
        if kind not in REQUIRED_NUISANCES:
            raise EstimatorError(f"Unknown estimator kind: {kind}")
        needed |= REQUIRED_NUISANCES[kind]
    return needed


def fit_nuisances(train: ObservationalDataset, kinds: Iterable[str],
                  candidates: Sequence[RegressorSpec] = DEFAULT_NUISANCE_CANDIDATES,
                  propensity_candidates: Sequence[PropensitySpec] = DEFAULT_PROPENSITY_CANDIDATES,
                  budget: Optional[SelectionBudget] = None,
                  rng: Optional[RngStream] = None,
                  epsilon: float = DEFAULT_EPSILON) -> NuisanceSet:
    """Select and fit exactly the nuisances the given estimator kinds need."""
    needed = required_nuisances(kinds)
    budget = budget or SelectionBudget()
    rng = rng or RngStream(0, ("nuisance",))
    X, W, Y = train.X, train.W, train.Y
    fitted = {}

    if "mu_xw" in needed:
        spec, fitted["mu_xw"] = select_by_cv(candidates, with_treatment(X, W), Y, budget, rng.child("mu_xw"))
        logger.info("Nuisance mu_xw: %s", spec.label)
    for t, name in ((0, "mu0"), (1, "mu1")):
        if name not in needed:
            continue
        rows = train.arm(t)
        if rows.size < MIN_ARM_ROWS:
            raise EstimatorError(f"treatment arm {t} has {rows.size} training rows, need {MIN_ARM_ROWS}")
        spec, fitted[name] = select_by_cv(candidates, X[rows], Y[rows], budget, rng.child(name))
        logger.info("Nuisance %s: %s", name, spec.label)
    if "m_x" in needed:
        spec, fitted["m_x"] = select_by_cv(candidates, X, Y, budget, rng.child("m_x"))
        logger.info("Nuisance m_x: %s", spec.label)
    if "pi" in needed:
        spec, fitted["pi"] = select_propensity_by_cv(propensity_candidates, X, W, budget, rng.child("pi"), epsilon)
        logger.info("Nuisance pi: %s", spec.label)

    return NuisanceSet(**fitted)
