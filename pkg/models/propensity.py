import warnings
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

from utils.errors import ConfigError, ModelFitError
from utils.numerics import RngStream

DEFAULT_EPSILON = 0.01

PROPENSITY_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "logistic": {"C": 1.0},
    "gradient-boosting": {"max_depth": 3, "n_estimators": 100, "learning_rate": 0.1},
    "constant": {},
}


@dataclass(frozen=True)
class PropensitySpec:
    family: str = "logistic"
    hyperparameters: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def of(cls, family: str, **hyperparameters) -> "PropensitySpec":
        return cls(family, tuple(sorted(hyperparameters.items()))).validate()

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "PropensitySpec":
        values = dict(values)
        return cls.of(values.pop("family", "logistic"), **values)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, **dict(self.hyperparameters)}

    @property
    def params(self) -> Dict[str, Any]:
        merged = dict(PROPENSITY_DEFAULTS[self.family])
        merged.update(self.hyperparameters)
        return merged

    @property
    def label(self) -> str:
        hp = ",".join(f"{k}={v}" for k, v in self.hyperparameters) or "-"
        return f"{self.family}|{hp}"

    def validate(self) -> "PropensitySpec":
        if self.family not in PROPENSITY_DEFAULTS:
            raise ConfigError(f"Unsupported propensity family: {self.family}")
        for key, _ in self.hyperparameters:
            if key not in PROPENSITY_DEFAULTS[self.family]:
                raise ConfigError(f"{self.family} propensity has no hyperparameter '{key}'")
        if self.family == "logistic" and not self.params["C"] > 0:
            raise ConfigError("logistic propensity: C must be > 0")
        return self


@dataclass(frozen=True, eq=False)
class PropensityModel:
    """Treatment classifier whose probabilities are clipped to [epsilon, 1 - epsilon]."""

    spec: PropensitySpec
    epsilon: float
    n_features: int
    pipeline: Optional[Pipeline] = None
    rate: Optional[float] = None

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Clipped P(W = 1 | X)."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelFitError(f"propensity model expects {self.n_features} features, got shape {X.shape}")
        if self.pipeline is None:
            raw = np.full(X.shape[0], self.rate, dtype=float)
        else:
            raw = self.pipeline.predict_proba(X)[:, 1]
        return np.clip(raw, self.epsilon, 1 - self.epsilon)


def fit_propensity(X: np.ndarray, W: np.ndarray, spec: Optional[PropensitySpec] = None,
                   epsilon: float = DEFAULT_EPSILON,
                   rng: Optional[RngStream] = None) -> PropensityModel:
    spec = (spec or PropensitySpec()).validate()
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float).ravel()
    if not 0 < epsilon < 0.5:
        raise ConfigError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    if X.ndim != 2 or X.shape[0] != W.shape[0]:
        raise ModelFitError(f"X has shape {X.shape} but W has {W.shape[0]} rows")
    if W.size == 0 or W.min() == W.max():
        raise ModelFitError("propensity model needs both treated and control rows")

    p = spec.params
    if spec.family == "constant":
        return PropensityModel(spec, epsilon, X.shape[1], rate=float(W.mean()))

    random_state = rng.random_state() if rng is not None else 0
    if spec.family == "logistic":
        clf = LogisticRegression(C=p["C"], max_iter=1000)
    else:
        clf = GradientBoostingClassifier(max_depth=p["max_depth"], n_estimators=p["n_estimators"],
                                         learning_rate=p["learning_rate"], random_state=random_state)
    pipeline = Pipeline([("scale", StandardScaler()), ("model", clf)])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            pipeline.fit(X, W.astype(int))
    except ValueError as e:
        raise ModelFitError(f"propensity {spec.label}: fit failed: {e}") from e
    return PropensityModel(spec, epsilon, X.shape[1], pipeline=pipeline)
