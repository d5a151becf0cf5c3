"""Observational model-selection scores and the oracle PEHE.

Every score takes the estimator's CATE on the validation rows and a
BoundContext holding the metric nuisances on those rows.
"""
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from learners.pseudo import dr_pseudo, ipw_pseudo
from scores.context import BoundContext
from utils.errors import ConfigError, ScoreError

MINIMIZE = "minimize"
MAXIMIZE = "maximize"
POLICIES = ("higher_is_better", "lower_is_better")
MATCHING_MODES = ("corrected", "literal")
CLIP_PRESETS = (0.1, 0.01)
ORACLE = "oracle_pehe"

BASE_METRICS = {
    "value": MAXIMIZE,
    "value_dr": MAXIMIZE,
    "value_dr_std": MAXIMIZE,
    "tau_t": MINIMIZE,
    "tau_s": MINIMIZE,
    "tau_match": MINIMIZE,
    "tau_iptw": MINIMIZE,
    "tau_dr": MINIMIZE,
    "influence": MINIMIZE,
    "r_score": MINIMIZE,
    ORACLE: MINIMIZE,
}
CLIPPABLE = ("value_dr", "value_dr_std", "tau_iptw", "tau_dr", "influence")
DEFAULT_METRICS = (
    "value", "value_dr", "value_dr_clip", "tau_t", "tau_s", "tau_match", "tau_iptw", "tau_iptw_clip",
    "tau_dr", "tau_dr_clip", "influence", "influence_clip", "r_score", ORACLE,
)
_NAME = re.compile(r"^(?P<base>[a-z_]+?)(?P<clip>_clip(@(?P<alpha>[0-9.eE+-]+))?)?$")


@dataclass(frozen=True)
class MetricDescriptor:
    name: str
    base: str
    orientation: str
    clip_alpha: Optional[float] = None


@dataclass(frozen=True)
class ScoreValue:
    metric: str
    estimator: str
    value: float
    n_used: int


@dataclass(frozen=True)
class ScoreOptions:
    policy: str = "higher_is_better"
    matching: str = "corrected"

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigError(f"policy must be one of {POLICIES}")
        if self.matching not in MATCHING_MODES:
            raise ConfigError(f"matching must be one of {MATCHING_MODES}")


def describe_metric(name: str, default_alpha: float = CLIP_PRESETS[0]) -> MetricDescriptor:
    """Parse `base`, `base_clip` or `base_clip@alpha` into a descriptor."""
    match = _NAME.match(name)
    if match is None or match.group("base") not in BASE_METRICS:
        raise ConfigError(f"Unknown metric: {name}")
    base = match.group("base")
    alpha = None
    if match.group("clip"):
        if base not in CLIPPABLE:
            raise ConfigError(f"metric {base} has no clipped variant")
        alpha = float(match.group("alpha")) if match.group("alpha") else default_alpha
        if not 0 < alpha < 0.5:
            raise ConfigError(f"clip alpha must lie in (0, 0.5), got {alpha}")
    return MetricDescriptor(name, base, BASE_METRICS[base], alpha)


def expand_metrics(names: Sequence[str], clip_alphas: Sequence[float] = (CLIP_PRESETS[0],)) -> List[MetricDescriptor]:
    """Descriptors for configured names; each `*_clip` name yields one metric per clip level."""
    if not clip_alphas:
        raise ConfigError("clip_alphas must not be empty")
    descriptors = []
    for name in names:
        descriptor = describe_metric(name, clip_alphas[0])
        descriptors.append(descriptor)
        if name.endswith("_clip"):
            for alpha in clip_alphas[1:]:
                descriptors.append(describe_metric(f"{name}@{alpha:g}"))
    seen = set()
    for d in descriptors:
        if d.name in seen:
            raise ConfigError(f"duplicate metric: {d.name}")
        seen.add(d.name)
    return descriptors


def _as_vector(tau_hat, n: int) -> np.ndarray:
    tau_hat = np.asarray(tau_hat, dtype=float).ravel()
    if tau_hat.shape[0] != n:
        raise ScoreError(f"{tau_hat.shape[0]} CATE values for {n} validation rows")
    if n == 0:
        raise ScoreError("empty validation set")
    return tau_hat


def decision(tau_hat: np.ndarray, policy: str = "higher_is_better") -> np.ndarray:
    """Treatment policy d(x): treat when the estimated effect improves the outcome."""
    tau_hat = np.asarray(tau_hat, dtype=float)
    return (tau_hat > 0).astype(float) if policy == "higher_is_better" else (tau_hat < 0).astype(float)


def clip_rows(pi: np.ndarray, alpha: float) -> np.ndarray:
    """Indices of rows with alpha < pi < 1 - alpha."""
    pi = np.asarray(pi, dtype=float)
    return np.flatnonzero((pi > alpha) & (pi < 1 - alpha))


def oracle_pehe(tau_hat: np.ndarray, tau: np.ndarray) -> float:
    tau = np.asarray(tau, dtype=float).ravel()
    tau_hat = _as_vector(tau_hat, tau.shape[0])
    return float(np.mean((tau_hat - tau) ** 2))


def value_score(tau_hat, b: BoundContext, policy: str = "higher_is_better") -> float:
    d = decision(_as_vector(tau_hat, b.n), policy)
    pi_w = np.where(b.W == 1, b.pi, 1 - b.pi)
    return float(np.mean(b.Y / pi_w * (b.W == d)))


def _dr_outcomes(b: BoundContext):
    return dr_pseudo(b.Y, b.W, b.mu_x0, b.mu_x1, b.pi)


def value_dr_score(tau_hat, b: BoundContext, policy: str = "higher_is_better") -> float:
    """Mean of d(x) times the DR outcome of the observed arm."""
    d = decision(_as_vector(tau_hat, b.n), policy)
    y1, y0 = _dr_outcomes(b)
    return float(np.mean(d * np.where(b.W == 1, y1, y0)))


def value_dr_standard_score(tau_hat, b: BoundContext, policy: str = "higher_is_better") -> float:
    """Doubly robust policy value: mean of d Y_dr_1 + (1 - d) Y_dr_0."""
    d = decision(_as_vector(tau_hat, b.n), policy)
    y1, y0 = _dr_outcomes(b)
    return float(np.mean(d * y1 + (1 - d) * y0))


def matching_score(tau_hat, b: BoundContext, mode: str = "corrected") -> float:
    tau_hat = _as_vector(tau_hat, b.n)
    tau_match = b.Y - b.match_y
    if mode == "corrected":
        tau_match = (2 * b.W - 1) * tau_match
    return float(np.mean((tau_hat - tau_match) ** 2))


def tau_iptw_score(tau_hat, b: BoundContext) -> float:
    tau_hat = _as_vector(tau_hat, b.n)
    y1, y0 = ipw_pseudo(b.Y, b.W, b.pi)
    return float(np.mean((tau_hat - (y1 - y0)) ** 2))


def tau_dr_score(tau_hat, b: BoundContext) -> float:
    tau_hat = _as_vector(tau_hat, b.n)
    y1, y0 = _dr_outcomes(b)
    return float(np.mean((tau_hat - (y1 - y0)) ** 2))


def influence_terms(tau_hat, b: BoundContext):
    """Per-row plug-in squared error and IF-correction against T = mu1 - mu0."""
    tau_hat = _as_vector(tau_hat, b.n)
    plugin = b.mu1 - b.mu0
    loss = (tau_hat - plugin) ** 2
    A = b.W - b.pi
    C = b.pi * (1 - b.pi)
    B = 2 * b.W * A / C
    correction = (1 - B) * plugin ** 2 + B * b.Y * (plugin - tau_hat) - (A + 1) * loss + tau_hat ** 2
    return loss, correction


def influence_score(tau_hat, b: BoundContext) -> float:
    loss, correction = influence_terms(tau_hat, b)
    return float(np.mean(loss) + np.mean(correction))


def r_score(tau_hat, b: BoundContext) -> float:
    tau_hat = _as_vector(tau_hat, b.n)
    return float(np.mean(((b.Y - b.g) - tau_hat * (b.W - b.pi)) ** 2))


def tau_s_score(tau_hat, b: BoundContext) -> float:
    tau_hat = _as_vector(tau_hat, b.n)
    return float(np.mean((tau_hat - (b.mu_x1 - b.mu_x0)) ** 2))


def tau_t_score(tau_hat, b: BoundContext) -> float:
    tau_hat = _as_vector(tau_hat, b.n)
    return float(np.mean((tau_hat - (b.mu1 - b.mu0)) ** 2))


def _score(base: str, tau_hat, b: BoundContext, options: ScoreOptions) -> float:
    if base == "value":
        return value_score(tau_hat, b, options.policy)
    if base == "value_dr":
        return value_dr_score(tau_hat, b, options.policy)
    if base == "value_dr_std":
        return value_dr_standard_score(tau_hat, b, options.policy)
    if base == "tau_match":
        return matching_score(tau_hat, b, options.matching)
    return SCORES[base](tau_hat, b)


SCORES = {
    "tau_t": tau_t_score,
    "tau_s": tau_s_score,
    "tau_iptw": tau_iptw_score,
    "tau_dr": tau_dr_score,
    "influence": influence_score,
    "r_score": r_score,
}


def evaluate_metric(descriptor: MetricDescriptor, tau_hat, b: BoundContext, estimator: str = "",
                    options: Optional[ScoreOptions] = None) -> ScoreValue:
    """Score one estimator, dropping extreme-propensity rows for clipped metrics."""
    if descriptor.base == ORACLE:
        raise ScoreError("oracle_pehe needs the true CATE; use oracle_pehe()")
    options = options or ScoreOptions()
    tau_hat = _as_vector(tau_hat, b.n)
    if descriptor.clip_alpha is not None:
        keep = clip_rows(b.pi, descriptor.clip_alpha)
        if keep.size == 0:
            raise ScoreError(f"{descriptor.name}: every validation row was clipped away")
        b, tau_hat = b.subset(keep), tau_hat[keep]
    value = _score(descriptor.base, tau_hat, b, options)
    if not np.isfinite(value):
        raise ScoreError(f"{descriptor.name}: non-finite score")
    return ScoreValue(descriptor.name, estimator, value, b.n)
