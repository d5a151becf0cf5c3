import logging
import warnings
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning
from sklearn.ensemble import GradientBoostingRegressor, RandomForestRegressor
from sklearn.exceptions import ConvergenceWarning
from sklearn.kernel_ridge import KernelRidge
from sklearn.linear_model import ElasticNet, HuberRegressor, Lasso, LinearRegression, Ridge
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import FunctionTransformer, PolynomialFeatures, StandardScaler
from sklearn.tree import DecisionTreeRegressor

from utils.errors import ConfigError, ModelFitError
from utils.numerics import RngStream

logger = logging.getLogger("CateBench.models")

# Allowed hyperparameters and their defaults, per family.
FAMILY_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "linear": {},
    "linear-poly2-no-interaction": {},
    "linear-poly2-interaction": {},
    "ridge": {"alpha": 1.0},
    "kernel-ridge": {"alpha": 1.0, "kernel": "linear", "gamma": None},
    "lasso": {"alpha": 1.0},
    "elastic-net": {"alpha": 1.0, "l1_ratio": 0.5},
    "huber": {"alpha": 1.0, "epsilon": 1.35},
    "decision-tree": {"max_depth": None},
    "random-forest": {"max_depth": None, "n_estimators": 100},
    "gradient-boosting": {"max_depth": None, "n_estimators": 100, "learning_rate": 0.1},
}
KERNELS = ("linear", "rbf", "sigmoid")
LASSO_TOL = 1e-7
LASSO_MAX_ITER = 10_000


def _format_value(value) -> str:
    if value is None:
        return "None"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


@dataclass(frozen=True)
class RegressorSpec:
    """A regression family plus its hyperparameters (sorted, hashable)."""

    family: str
    hyperparameters: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def of(cls, family: str, **hyperparameters) -> "RegressorSpec":
        return cls(family, tuple(sorted(hyperparameters.items()))).validate()

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "RegressorSpec":
        values = dict(values)
        family = values.pop("family", None)
        if family is None:
            raise ConfigError("regressor spec needs a 'family' key")
        return cls.of(family, **values)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, **dict(self.hyperparameters)}

    @property
    def params(self) -> Dict[str, Any]:
        merged = dict(FAMILY_DEFAULTS[self.family])
        merged.update(self.hyperparameters)
        return merged

    @property
    def hyperparameter_string(self) -> str:
        if not self.hyperparameters:
            return "-"
        return ",".join(f"{k}={_format_value(v)}" for k, v in self.hyperparameters)

    @property
    def label(self) -> str:
        return f"{self.family}|{self.hyperparameter_string}"

    def validate(self) -> "RegressorSpec":
        if self.family not in FAMILY_DEFAULTS:
            raise ConfigError(f"Unsupported regressor family: {self.family}")
        allowed = FAMILY_DEFAULTS[self.family]
        for key, value in self.hyperparameters:
            if key not in allowed:
                raise ConfigError(f"{self.family} has no hyperparameter '{key}'")
        params = self.params
        if "alpha" in params and not params["alpha"] > 0:
            raise ConfigError(f"{self.family}: alpha must be > 0")
        if params.get("max_depth") is not None and int(params["max_depth"]) < 1:
            raise ConfigError(f"{self.family}: max_depth must be >= 1 or None")
        if "n_estimators" in params and int(params["n_estimators"]) < 1:
            raise ConfigError(f"{self.family}: n_estimators must be >= 1")
        if "learning_rate" in params and not params["learning_rate"] > 0:
            raise ConfigError(f"{self.family}: learning_rate must be > 0")
        if "l1_ratio" in params and not 0 <= params["l1_ratio"] <= 1:
            raise ConfigError(f"{self.family}: l1_ratio must lie in [0, 1]")
        if "kernel" in params and params["kernel"] not in KERNELS:
            raise ConfigError(f"{self.family}: kernel must be one of {KERNELS}")
        return self


def add_squares(X: np.ndarray) -> np.ndarray:
    """Degree-2 features without interaction terms."""
    return np.hstack([X, X ** 2])


def _build_pipeline(spec: RegressorSpec, random_state: int) -> Pipeline:
    p = spec.params
    family = spec.family
    steps = [("scale", StandardScaler())]

    if family == "linear":
        model = LinearRegression()
    elif family == "linear-poly2-no-interaction":
        steps.append(("features", FunctionTransformer(add_squares)))
        model = LinearRegression()
    elif family == "linear-poly2-interaction":
        steps.append(("features", PolynomialFeatures(degree=2, include_bias=False)))
        model = LinearRegression()
    elif family == "ridge":
        model = Ridge(alpha=p["alpha"])
    elif family == "kernel-ridge":
        model = KernelRidge(alpha=p["alpha"], kernel=p["kernel"], gamma=p["gamma"])
    elif family == "lasso":
        model = Lasso(alpha=p["alpha"], tol=LASSO_TOL, max_iter=LASSO_MAX_ITER)
    elif family == "elastic-net":
        model = ElasticNet(alpha=p["alpha"], l1_ratio=p["l1_ratio"], tol=LASSO_TOL, max_iter=LASSO_MAX_ITER)
    elif family == "huber":
        model = HuberRegressor(alpha=p["alpha"], epsilon=p["epsilon"], max_iter=1000)
    # Tree families break equal-gain split ties by the feature order sklearn draws from
    # random_state, not by lowest feature index and threshold.
    elif family == "decision-tree":
        model = DecisionTreeRegressor(max_depth=p["max_depth"], random_state=random_state)
    elif family == "random-forest":
        model = RandomForestRegressor(n_estimators=p["n_estimators"], max_depth=p["max_depth"],
                                      bootstrap=True, random_state=random_state)
    elif family == "gradient-boosting":
        model = GradientBoostingRegressor(n_estimators=p["n_estimators"], max_depth=p["max_depth"],
                                          learning_rate=p["learning_rate"], loss="squared_error",
                                          random_state=random_state)
    else:
        raise ConfigError(f"Unsupported regressor family: {family}")

    steps.append(("model", model))
    return Pipeline(steps)


@dataclass(frozen=True, eq=False)
class RegressorModel:
    spec: RegressorSpec
    pipeline: Pipeline
    n_features: int

    @property
    def model(self):
        """The fitted final scikit-learn estimator."""
        return self.pipeline.named_steps["model"]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelFitError(f"{self.spec.label}: expected {self.n_features} features, got shape {X.shape}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            pred = np.asarray(self.pipeline.predict(X), dtype=float).ravel()
        if not np.all(np.isfinite(pred)):
            raise ModelFitError(f"{self.spec.label}: non-finite predictions")
        return pred


def fit_regressor(spec: RegressorSpec, X: np.ndarray, y: np.ndarray,
                  weights: Optional[np.ndarray] = None,
                  rng: Optional[RngStream] = None) -> RegressorModel:
    """Fit spec by (weighted) squared loss plus the family penalty.

    Rows with zero weight are dropped before fitting, so a zero weight is
    exactly equivalent to removing the row.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ModelFitError(f"X has shape {X.shape} but y has {y.shape[0]} rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ModelFitError("training data contains non-finite values")

    fit_params = {}
    if weights is not None:
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.shape[0] != y.shape[0]:
            raise ModelFitError(f"{weights.shape[0]} weights for {y.shape[0]} rows")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ModelFitError("weights must be finite and nonnegative")
        keep = weights > 0
        X, y, weights = X[keep], y[keep], weights[keep]
        fit_params = {"scale__sample_weight": weights, "model__sample_weight": weights}
    if y.shape[0] < 2:
        raise ModelFitError(f"{spec.label}: need at least 2 rows with positive weight")

    random_state = rng.random_state() if rng is not None else 0
    pipeline = _build_pipeline(spec.validate(), random_state)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            warnings.simplefilter("ignore", LinAlgWarning)
            warnings.simplefilter("ignore", RuntimeWarning)
            pipeline.fit(X, y, **fit_params)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise ModelFitError(f"{spec.label}: fit failed: {e}") from e

    return RegressorModel(spec=spec, pipeline=pipeline, n_features=X.shape[1])
