"""Synthetic data-generating processes with full counterfactual ground truth.

Each family draws X ~ N(0, I_d), assigns treatment through a clipped logistic
propensity of a linear confounding score, and generates both potential
outcomes around family-specific conditional means.
"""
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit

from datagen.dataset import OracleDataset
from utils.errors import DataError
from utils.numerics import RngStream

logger = logging.getLogger("CateBench.datagen")

FAMILIES = (
    "linear-constant",
    "linear-heterogeneous",
    "polynomial-heterogeneous",
    "step-heterogeneous",
)
MIN_ROWS = 20
MAX_REDRAWS = 100
_BASELINE_COEFS = np.array([1.0, 0.5, 0.25])


@dataclass(frozen=True)
class DgpSpec:
    family: str
    d: int = 5
    confounding_strength: float = 1.0
    overlap_floor: float = 0.05
    noise_sd: float = 1.0
    effect_scale: float = 1.0

    def validate(self) -> "DgpSpec":
        if self.family not in FAMILIES:
            raise DataError(f"Unknown DGP family: {self.family}")
        if self.d < 1:
            raise DataError(f"covariate dimension must be >= 1, got {self.d}")
        numeric = (self.confounding_strength, self.overlap_floor, self.noise_sd, self.effect_scale)
        if not all(math.isfinite(v) for v in numeric):
            raise DataError("DGP parameters must be finite")
        if self.confounding_strength < 0:
            raise DataError("confounding_strength must be >= 0")
        if not 0 < self.overlap_floor <= 0.5:
            raise DataError("overlap_floor must lie in (0, 0.5]")
        if self.noise_sd < 0:
            raise DataError("noise_sd must be >= 0")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def _column(X: np.ndarray, j: int) -> np.ndarray:
    return X[:, j] if X.shape[1] > j else np.zeros(X.shape[0])


def confounding_score(X: np.ndarray) -> np.ndarray:
    k = min(X.shape[1], 3)
    return X[:, :k].sum(axis=1) / math.sqrt(k)


def conditional_means(spec: DgpSpec, X: np.ndarray):
    """True (mu0, tau) for a family."""
    k = min(X.shape[1], 3)
    linear = X[:, :k] @ _BASELINE_COEFS[:k]
    x1, x2 = _column(X, 0), _column(X, 1)
    scale = spec.effect_scale

    if spec.family == "linear-constant":
        return linear, np.full(X.shape[0], scale, dtype=float)
    if spec.family == "linear-heterogeneous":
        return linear, scale * x1
    if spec.family == "polynomial-heterogeneous":
        # Quadratic surface with a linear effect: mu(x, w) is a degree-2
        # polynomial in (x, w).
        mu0 = x1 ** 2 + 0.5 * x1 * x2 - 0.5 * x2 ** 2 + 0.5 * x1
        return mu0, scale * (x1 + 0.5 * x2)
    # step-heterogeneous
    mu0 = linear + (x2 > 0).astype(float)
    return mu0, scale * ((x1 > 0).astype(float) - 0.5)


def generate(spec: DgpSpec, n: int, rng: RngStream) -> OracleDataset:
    """Draw an OracleDataset of n rows from the family described by spec."""
    spec.validate()
    if n < MIN_ROWS:
        raise DataError(f"generate needs n >= {MIN_ROWS}, got {n}")

    X = rng.child("covariates").generator().standard_normal((n, spec.d))
    pi = expit(spec.confounding_strength * confounding_score(X))
    pi = np.clip(pi, spec.overlap_floor, 1 - spec.overlap_floor)

    for attempt in range(MAX_REDRAWS):
        W = (rng.child("treatment", attempt).generator().random(n) < pi).astype(float)
        if 0 < W.sum() < n:
            break
    else:
        raise DataError(f"treatment draw stayed single-class after {MAX_REDRAWS} attempts")

    mu0, tau = conditional_means(spec, X)
    mu1 = mu0 + tau
    noise = rng.child("noise").generator().standard_normal((n, 2)) * spec.noise_sd
    Y0 = mu0 + noise[:, 0]
    Y1 = mu1 + noise[:, 1]
    Y = W * Y1 + (1 - W) * Y0

    logger.info("Generated %s dataset: n=%d, d=%d, treated=%.3f",
                spec.family, n, spec.d, W.mean())
    return OracleDataset(X=X, W=W, Y=Y, Y0=Y0, Y1=Y1, mu0=mu0, mu1=mu1, pi=pi, tau=tau)
