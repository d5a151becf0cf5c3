import numpy as np

from datagen import OracleDataset


def make_oracle(X, W, mu0, tau, pi=None, noise=None) -> OracleDataset:
    """Oracle dataset from explicit conditional means; noise is added to both arms."""
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float)
    mu0 = np.asarray(mu0, dtype=float)
    tau = np.asarray(tau, dtype=float)
    n = X.shape[0]
    pi = np.full(n, 0.5) if pi is None else np.asarray(pi, dtype=float)
    noise = np.zeros((n, 2)) if noise is None else np.asarray(noise, dtype=float)
    mu1 = mu0 + tau
    Y0, Y1 = mu0 + noise[:, 0], mu1 + noise[:, 1]
    return OracleDataset(X=X, W=W, Y=W * Y1 + (1 - W) * Y0, Y0=Y0, Y1=Y1, mu0=mu0, mu1=mu1, pi=pi, tau=tau)
