"""Deterministic k-fold grid selection of nuisance models.

Candidates are scored in list order, at most ``max_candidates`` of them; the
lowest mean fold loss wins and ties go to the earlier candidate.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import log_loss

from models.propensity import DEFAULT_EPSILON, PropensityModel, PropensitySpec, fit_propensity
from models.regressors import RegressorModel, RegressorSpec, fit_regressor
from utils.errors import ConfigError, ModelFitError
from utils.numerics import RngStream, kfold

logger = logging.getLogger("CateBench.models")

DEFAULT_NUISANCE_CANDIDATES: Tuple[RegressorSpec, ...] = (
    RegressorSpec.of("linear"),
    RegressorSpec.of("linear-poly2-interaction"),
    RegressorSpec.of("ridge", alpha=1.0),
    RegressorSpec.of("ridge", alpha=10.0),
    RegressorSpec.of("decision-tree", max_depth=5),
    RegressorSpec.of("random-forest", max_depth=6, n_estimators=50),
    RegressorSpec.of("gradient-boosting", max_depth=3, n_estimators=100),
)
DEFAULT_PROPENSITY_CANDIDATES: Tuple[PropensitySpec, ...] = (PropensitySpec.of("logistic"),)


@dataclass(frozen=True)
class SelectionBudget:
    max_candidates: int = 50
    cv_folds: int = 5

    def __post_init__(self):
        if self.max_candidates < 1:
            raise ConfigError("max_candidates must be >= 1")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")


def _folds(n: int, budget: SelectionBudget, rng: RngStream) -> List[np.ndarray]:
    if n < 2:
        raise ModelFitError(f"cannot cross-validate on {n} rows")
    return kfold(n, min(budget.cv_folds, n), rng.child("folds"))


def _argmin_first(scores: Sequence[float]) -> int:
    best = 0
    for i, score in enumerate(scores):
        if score < scores[best]:
            best = i
    return best


def select_by_cv(candidates: Sequence[RegressorSpec], X: np.ndarray, y: np.ndarray,
                 budget: Optional[SelectionBudget] = None,
                 rng: Optional[RngStream] = None) -> Tuple[RegressorSpec, RegressorModel]:
    """Pick the candidate with the lowest k-fold MSE and refit it on all rows."""
    if not candidates:
        raise ConfigError("select_by_cv needs at least one candidate")
    budget = budget or SelectionBudget()
    rng = rng or RngStream(0, ("select",))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    evaluated = list(candidates)[:budget.max_candidates]

    if len(evaluated) == 1:
        return evaluated[0], fit_regressor(evaluated[0], X, y, rng=rng.child("refit"))

    folds = _folds(y.shape[0], budget, rng)
    all_rows = np.arange(y.shape[0])
    scores = []
    for spec in evaluated:
        losses = []
        try:
            for k, test in enumerate(folds):
                train = np.setdiff1d(all_rows, test, assume_unique=True)
                model = fit_regressor(spec, X[train], y[train], rng=rng.child("cv", spec.label, k))
                losses.append(float(np.mean((model.predict(X[test]) - y[test]) ** 2)))
            scores.append(float(np.mean(losses)))
        except ModelFitError as e:
            logger.warning("CV candidate %s failed: %s", spec.label, e)
            scores.append(np.inf)

    best = _argmin_first(scores)
    if not np.isfinite(scores[best]):
        raise ModelFitError("every selection candidate failed")
    logger.debug("Selected %s (cv mse %.6g) among %d candidates", evaluated[best].label, scores[best], len(evaluated))
    return evaluated[best], fit_regressor(evaluated[best], X, y, rng=rng.child("refit"))


def select_propensity_by_cv(candidates: Sequence[PropensitySpec], X: np.ndarray, W: np.ndarray,
                            budget: Optional[SelectionBudget] = None,
                            rng: Optional[RngStream] = None,
                            epsilon: float = DEFAULT_EPSILON) -> Tuple[PropensitySpec, PropensityModel]:
    """Pick the propensity candidate with the lowest k-fold log-loss."""
    if not candidates:
        raise ConfigError("select_propensity_by_cv needs at least one candidate")
    budget = budget or SelectionBudget()
    rng = rng or RngStream(0, ("select-propensity",))
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float).ravel()
    evaluated = list(candidates)[:budget.max_candidates]

    if len(evaluated) == 1:
        return evaluated[0], fit_propensity(X, W, evaluated[0], epsilon, rng=rng.child("refit"))

    folds = _folds(W.shape[0], budget, rng)
    all_rows = np.arange(W.shape[0])
    scores = []
    for spec in evaluated:
        losses = []
        try:
            for k, test in enumerate(folds):
                train = np.setdiff1d(all_rows, test, assume_unique=True)
                model = fit_propensity(X[train], W[train], spec, epsilon, rng=rng.child("cv", spec.label, k))
                losses.append(log_loss(W[test], model.predict(X[test]), labels=[0, 1]))
            scores.append(float(np.mean(losses)))
        except ModelFitError as e:
            logger.warning("CV propensity candidate %s failed: %s", spec.label, e)
            scores.append(np.inf)

    best = _argmin_first(scores)
    if not np.isfinite(scores[best]):
        raise ModelFitError("every propensity candidate failed")
    return evaluated[best], fit_propensity(X, W, evaluated[best], epsilon, rng=rng.child("refit"))
