"""CATE meta-learners built on a shared, pre-fitted NuisanceSet.

S and T learners are plain plug-ins; the remaining kinds regress a
learner-specific target on X with a final model from the bank.
"""
from typing import Dict, Optional, Tuple

import numpy as np

from datagen.dataset import ObservationalDataset
from learners.nuisance import NuisanceSet
from learners.pseudo import dr_pseudo, ipw_pseudo
from models import RegressorModel, RegressorSpec, fit_regressor
from utils.errors import EstimatorError, ModelFitError
from utils.numerics import RngStream

SINGLETON_KINDS = ("S", "T")
FINAL_KINDS = ("projected-S", "X", "IPW", "DR", "R")
KINDS = SINGLETON_KINDS + FINAL_KINDS
WEIGHT_FLOOR = 1e-12


def estimator_label(kind: str, final_spec: Optional[RegressorSpec] = None) -> str:
    if final_spec is None:
        return f"{kind}|-|-"
    return f"{kind}|{final_spec.family}|{final_spec.hyperparameter_string}"


class CateEstimator:
    kind = ""

    def __init__(self, nuisances: NuisanceSet, final_model: Optional[RegressorModel] = None):
        self.nuisances = nuisances
        self.final_model = final_model
        self.label = estimator_label(self.kind, final_model.spec if final_model else None)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return self.final_model.predict(X)

    def predict_cate(self, X: np.ndarray) -> np.ndarray:
        """One finite CATE estimate per row of X."""
        X = np.asarray(X, dtype=float)
        try:
            tau = np.asarray(self._predict(X), dtype=float).ravel()
        except ModelFitError as e:
            raise EstimatorError(f"{self.label}: {e}") from e
        if tau.shape[0] != X.shape[0] or not np.all(np.isfinite(tau)):
            raise EstimatorError(f"{self.label}: invalid CATE predictions")
        return tau

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


class SLearner(CateEstimator):
    kind = "S"

    def _predict(self, X):
        mu_0, mu_1 = self.nuisances.joint_plugin(X)
        return mu_1 - mu_0


class TLearner(CateEstimator):
    kind = "T"

    def _predict(self, X):
        mu0, mu1 = self.nuisances.require("mu0", "mu1")
        return mu1.predict(X) - mu0.predict(X)


class ProjectedSLearner(CateEstimator):
    kind = "projected-S"


class IPWLearner(CateEstimator):
    kind = "IPW"


class DRLearner(CateEstimator):
    kind = "DR"


class RLearner(CateEstimator):
    kind = "R"


class XLearner(CateEstimator):
    kind = "X"

    def __init__(self, nuisances: NuisanceSet, f0: RegressorModel, f1: RegressorModel):
        super().__init__(nuisances, final_model=f0)
        self.f0 = f0
        self.f1 = f1

    def components(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f0(x), f1(x), pi(x))."""
        (pi,) = self.nuisances.require("pi")
        return self.f0.predict(X), self.f1.predict(X), pi.predict(X)

    def _predict(self, X):
        f0, f1, p1 = self.components(X)
        return (1 - p1) * f0 + p1 * f1


def _fit_final(spec: RegressorSpec, X, target, rng: Optional[RngStream], weights=None) -> RegressorModel:
    try:
        return fit_regressor(spec, X, target, weights=weights, rng=rng)
    except ModelFitError as e:
        raise EstimatorError(f"final model {spec.label}: {e}") from e


def fit_s(nuis: NuisanceSet) -> SLearner:
    nuis.require("mu_xw")
    return SLearner(nuis)


def fit_t(nuis: NuisanceSet) -> TLearner:
    nuis.require("mu0", "mu1")
    return TLearner(nuis)


def fit_projected_s(nuis: NuisanceSet, final_spec: RegressorSpec, train: ObservationalDataset,
                    rng: Optional[RngStream] = None) -> ProjectedSLearner:
    """Regress the S plug-in effect mu(x, 1) - mu(x, 0) on X."""
    mu_0, mu_1 = nuis.joint_plugin(train.X)
    return ProjectedSLearner(nuis, _fit_final(final_spec, train.X, mu_1 - mu_0, rng))


def x_learner_targets(nuis: NuisanceSet, train: ObservationalDataset) -> Dict[int, Tuple[np.ndarray, np.ndarray]]:
    """Per-arm (rows, imputed effects): mu1(x) - y on controls, y - mu0(x) on treated."""
    mu0, mu1 = nuis.require("mu0", "mu1")
    controls, treated = train.arm(0), train.arm(1)
    if controls.size == 0 or treated.size == 0:
        raise EstimatorError("X-learner needs both treatment arms")
    return {
        0: (controls, mu1.predict(train.X[controls]) - train.Y[controls]),
        1: (treated, train.Y[treated] - mu0.predict(train.X[treated])),
    }


def fit_x(nuis: NuisanceSet, final_spec: RegressorSpec, train: ObservationalDataset,
          rng: Optional[RngStream] = None) -> XLearner:
    """X-learner combining pi_0 * f0 + pi_1 * f1."""
    nuis.require("pi")
    rng = rng or RngStream(0, ("x-learner",))
    targets = x_learner_targets(nuis, train)
    f0 = _fit_final(final_spec, train.X[targets[0][0]], targets[0][1], rng.child("f0"))
    f1 = _fit_final(final_spec, train.X[targets[1][0]], targets[1][1], rng.child("f1"))
    return XLearner(nuis, f0, f1)


def fit_ipw(nuis: NuisanceSet, final_spec: RegressorSpec, train: ObservationalDataset,
            rng: Optional[RngStream] = None) -> IPWLearner:
    (pi,) = nuis.require("pi")
    y1, y0 = ipw_pseudo(train.Y, train.W, pi.predict(train.X))
    return IPWLearner(nuis, _fit_final(final_spec, train.X, y1 - y0, rng))


def fit_dr(nuis: NuisanceSet, final_spec: RegressorSpec, train: ObservationalDataset,
           rng: Optional[RngStream] = None) -> DRLearner:
    (pi,) = nuis.require("pi")
    mu_0, mu_1 = nuis.joint_plugin(train.X)
    y1, y0 = dr_pseudo(train.Y, train.W, mu_0, mu_1, pi.predict(train.X))
    return DRLearner(nuis, _fit_final(final_spec, train.X, y1 - y0, rng))


def r_learner_problem(nuis: NuisanceSet, train: ObservationalDataset) -> Tuple[np.ndarray, np.ndarray]:
    """Targets (Y - m(x)) / (W - pi(x)) and weights (W - pi(x))^2."""
    m_x, pi = nuis.require("m_x", "pi")
    treatment_residual = train.W - pi.predict(train.X)
    weights = treatment_residual ** 2
    if np.all(weights < WEIGHT_FLOOR):
        raise EstimatorError("R-learner weights vanish: propensity equals treatment everywhere")
    targets = (train.Y - m_x.predict(train.X)) / treatment_residual
    return targets, weights


def fit_r(nuis: NuisanceSet, final_spec: RegressorSpec, train: ObservationalDataset,
          rng: Optional[RngStream] = None) -> RLearner:
    targets, weights = r_learner_problem(nuis, train)
    return RLearner(nuis, _fit_final(final_spec, train.X, targets, rng, weights=weights))


FITTERS = {
    "projected-S": fit_projected_s,
    "X": fit_x,
    "IPW": fit_ipw,
    "DR": fit_dr,
    "R": fit_r,
}


def fit_estimator(kind: str, nuis: NuisanceSet, train: ObservationalDataset,
                  final_spec: Optional[RegressorSpec] = None,
                  rng: Optional[RngStream] = None) -> CateEstimator:
    if kind == "S":
        return fit_s(nuis)
    if kind == "T":
        return fit_t(nuis)
    if kind not in FITTERS:
        raise EstimatorError(f"Unknown estimator kind: {kind}")
    if final_spec is None:
        raise EstimatorError(f"{kind} learner needs a final model")
    return FITTERS[kind](nuis, final_spec, train, rng)
