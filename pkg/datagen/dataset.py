import math
from dataclasses import dataclass, fields
from typing import Dict, Optional

import numpy as np

from utils.errors import DataError, SingularMatrixError
from utils.numerics import RngStream, solve_spd

DEFAULT_SPLIT_FRACTION = 0.8
DEFAULT_HETEROGENEITY_THRESHOLD = 0.01
MAX_RESHUFFLES = 100


def _frozen(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DataError(f"{name} must have {ndim} dimension(s), got {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ObservationalDataset:
    """Covariates X (n x d), binary treatment W and factual outcome Y."""

    X: np.ndarray
    W: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = _frozen(self.X, "X", 2)
        W = _frozen(self.W, "W", 1)
        Y = _frozen(self.Y, "Y", 1)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "Y", Y)
        n = X.shape[0]
        if n < 2:
            raise DataError(f"dataset needs at least 2 rows, got {n}")
        if W.shape[0] != n or Y.shape[0] != n:
            raise DataError(f"row counts differ: X={n}, W={W.shape[0]}, Y={Y.shape[0]}")
        if not np.all((W == 0) | (W == 1)):
            raise DataError("W must be binary (0/1)")
        if W.min() == W.max():
            raise DataError("W must contain both treated and control rows")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def has_oracle(self) -> bool:
        return False

    def arm(self, t: int) -> np.ndarray:
        """Row indices with W == t."""
        return np.flatnonzero(self.W == t)

    def subset(self, index) -> "ObservationalDataset":
        index = np.asarray(index)
        values = {f.name: getattr(self, f.name)[index] for f in fields(self)}
        return type(self)(**values)

    def observational(self) -> "ObservationalDataset":
        return ObservationalDataset(self.X, self.W, self.Y)


@dataclass(frozen=True, eq=False)
class OracleDataset(ObservationalDataset):
    """Observational data plus potential outcomes, true means, propensity and CATE."""

    Y0: np.ndarray
    Y1: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray
    pi: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        super().__post_init__()
        for name in ("Y0", "Y1", "mu0", "mu1", "pi", "tau"):
            arr = _frozen(getattr(self, name), name, 1)
            if arr.shape[0] != self.n:
                raise DataError(f"{name} has {arr.shape[0]} rows, expected {self.n}")
            object.__setattr__(self, name, arr)
        factual = self.W * self.Y1 + (1 - self.W) * self.Y0
        if not np.allclose(self.Y, factual, rtol=1e-12, atol=1e-12):
            raise DataError("consistency violated: Y != W*Y1 + (1-W)*Y0")
        if not np.allclose(self.tau, self.mu1 - self.mu0, rtol=1e-12, atol=1e-12):
            raise DataError("tau must equal mu1 - mu0")
        if not np.all((self.pi > 0) & (self.pi < 1)):
            raise DataError("propensities must lie strictly inside (0, 1)")

    @property
    def has_oracle(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class SplitPair:
    train: ObservationalDataset
    val: ObservationalDataset
    fraction: float
    train_index: np.ndarray
    val_index: np.ndarray


def heterogeneity_ok(ds: OracleDataset, threshold: float = DEFAULT_HETEROGENEITY_THRESHOLD) -> bool:
    """True iff the sample variance of the true CATE reaches the threshold."""
    return bool(np.var(ds.tau, ddof=1) >= threshold)


def split(ds: ObservationalDataset, fraction: float = DEFAULT_SPLIT_FRACTION,
          rng: Optional[RngStream] = None) -> SplitPair:
    """Shuffle-split into ceil(fraction * n) training rows and the remainder."""
    if not 0 < fraction < 1:
        raise DataError(f"split fraction must lie in (0, 1), got {fraction}")
    rng = rng or RngStream(0, ("split",))
    n_train = math.ceil(round(fraction * ds.n, 9))
    if n_train >= ds.n:
        raise DataError(f"fraction {fraction} leaves no validation rows for n={ds.n}")

    for attempt in range(MAX_RESHUFFLES):
        perm = rng.child("shuffle", attempt).generator().permutation(ds.n)
        train_idx = np.sort(perm[:n_train])
        val_idx = np.sort(perm[n_train:])
        w_train, w_val = ds.W[train_idx], ds.W[val_idx]
        if w_train.min() != w_train.max() and w_val.min() != w_val.max():
            return SplitPair(ds.subset(train_idx), ds.subset(val_idx), fraction, train_idx, val_idx)
    raise DataError(f"split left a treatment arm empty after {MAX_RESHUFFLES} reshuffles")


def describe(ds: ObservationalDataset) -> Dict:
    """Summary statistics of a dataset; oracle fields only when available."""
    summary = {
        'n': ds.n,
        'd': ds.d,
        'treated_fraction': float(ds.W.mean()),
    }
    if not ds.has_oracle:
        return summary

    summary.update({
        'ate': float(ds.tau.mean()),
        'tau_variance': float(np.var(ds.tau, ddof=1)),
        'pi_min': float(ds.pi.min()),
        'pi_max': float(ds.pi.max()),
        'tau_linear_r2': _linear_r2(ds.X, ds.tau),
    })
    return summary


def _linear_r2(X: np.ndarray, target: np.ndarray) -> Optional[float]:
    """R^2 of the least-squares projection of target on [1, X]."""
    design = np.column_stack([np.ones(X.shape[0]), X])
    try:
        coef = solve_spd(design.T @ design, design.T @ target)
    except SingularMatrixError:
        return None
    resid = target - design @ coef
    total = np.sum((target - target.mean()) ** 2)
    if total <= 1e-24:
        return 1.0
    return float(1.0 - np.sum(resid ** 2) / total)
