import hashlib
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.stats import rankdata
from sklearn.model_selection import KFold
from sklearn.preprocessing import StandardScaler

from utils.errors import SingularMatrixError

PIVOT_FLOOR = 1e-12
SCALE_FLOOR = 1e-12


def _label_key(label) -> int:
    """Stable 64-bit key for an RNG path label."""
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class RngStream:
    """Path-keyed random stream.

    The same (root_seed, path) always reproduces the same draws, and streams
    on different paths are independent, so adding a component never shifts
    the randomness of another one.
    """

    root_seed: int
    path: Tuple[str, ...] = ()

    def child(self, *labels) -> "RngStream":
        return RngStream(self.root_seed, self.path + tuple(str(label) for label in labels))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=int(self.root_seed),
            spawn_key=tuple(_label_key(label) for label in self.path),
        )
        return np.random.Generator(np.random.Philox(seq))

    def random_state(self) -> int:
        """Integer seed for scikit-learn estimators."""
        return int(self.generator().integers(0, 2**31 - 1))


def check_finite(name: str, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} contains non-finite entries")
    return values


def solve_spd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for symmetric positive-definite A by Cholesky."""
    A = check_finite("A", A)
    b = check_finite("b", b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise ValueError(f"b has length {b.shape[0] if b.ndim else 0}, expected {A.shape[0]}")
    if not np.allclose(A, A.T, rtol=1e-10, atol=1e-12):
        raise ValueError("A must be symmetric")
    try:
        factor = linalg.cholesky(A, lower=True)
    except linalg.LinAlgError as e:
        raise SingularMatrixError(f"matrix is not positive definite: {e}") from e
    if np.min(np.diag(factor) ** 2) < PIVOT_FLOOR:
        raise SingularMatrixError("Cholesky pivot below 1e-12")
    return linalg.cho_solve((factor, True), b)


def log_grid(start_exponent: int, end_exponent: int, count: int) -> List[float]:
    """`count` values geometrically spaced from 10**start to 10**end."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return [float(v) for v in np.logspace(start_exponent, end_exponent, count)]


def spearman(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties."""
    a = check_finite("a", a)
    b = check_finite("b", b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("spearman inputs must be vectors of equal length")
    if a.shape[0] < 2:
        raise ValueError("spearman needs at least 2 observations")
    ra = rankdata(a, method="average")
    rb = rankdata(b, method="average")
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt(np.dot(ra, ra) * np.dot(rb, rb))
    if denom == 0.0:
        raise ValueError("spearman is undefined for constant input")
    return float(np.clip(np.dot(ra, rb) / denom, -1.0, 1.0))


def kfold(n: int, k: int, rng: RngStream) -> List[np.ndarray]:
    """k disjoint shuffled folds covering range(n)."""
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    splitter = KFold(n_splits=k, shuffle=True, random_state=rng.random_state())
    return [np.sort(test) for _, test in splitter.split(np.zeros((n, 1)))]


def standardize(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center and scale columns; near-constant columns keep scale 1."""
    X = check_finite("X", X)
    if X.ndim != 2:
        raise ValueError("X must be a matrix")
    scaler = StandardScaler().fit(X)
    scale = np.sqrt(scaler.var_)
    scale[scale < SCALE_FLOOR] = 1.0
    scaler.scale_ = scale
    return scaler.transform(X), scaler.mean_.copy(), scale
