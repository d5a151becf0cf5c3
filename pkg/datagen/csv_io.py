import re
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from datagen.dataset import ObservationalDataset, OracleDataset
from utils.errors import DataError, SchemaError

ORACLE_COLUMNS = ["y0", "y1", "mu0", "mu1", "pi", "tau"]
_X_COLUMN = re.compile(r"^x(\d+)$")


def dataset_columns(d: int, has_oracle: bool) -> List[str]:
    columns = [f"x{j}" for j in range(d)] + ["w", "y"]
    return columns + ORACLE_COLUMNS if has_oracle else columns


def write_csv(ds: ObservationalDataset, path: Union[str, Path]) -> Path:
    """Write a dataset as UTF-8 CSV with header x0..x{d-1},w,y[,oracle columns]."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(ds.X, columns=[f"x{j}" for j in range(ds.d)])
    frame["w"] = ds.W.astype(int)
    frame["y"] = ds.Y
    if ds.has_oracle:
        for column, values in zip(ORACLE_COLUMNS, (ds.Y0, ds.Y1, ds.mu0, ds.mu1, ds.pi, ds.tau)):
            frame[column] = values
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")
    return path


def _parse_header(columns: List[str]) -> int:
    d = 0
    while d < len(columns) and _X_COLUMN.match(columns[d]):
        if columns[d] != f"x{d}":
            raise SchemaError(f"expected column x{d}, found {columns[d]}")
        d += 1
    if d == 0:
        raise SchemaError("header must start with covariate columns x0, x1, ...")
    if columns[d:d + 2] != ["w", "y"]:
        raise SchemaError(f"expected columns w,y after x0..x{d - 1}, found {columns[d:d + 2]}")
    return d


def read_csv(path: Union[str, Path], has_oracle: bool = True) -> ObservationalDataset:
    """Read a dataset file; with has_oracle the counterfactual columns are required."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise SchemaError(f"cannot read dataset {path}: {e}") from e

    columns = [c.strip() for c in frame.columns]
    d = _parse_header(columns)
    rest = columns[d + 2:]
    if has_oracle and rest != ORACLE_COLUMNS:
        raise SchemaError(f"{path}: oracle columns {ORACLE_COLUMNS} required, found {rest}")
    if not has_oracle and rest not in ([], ORACLE_COLUMNS):
        raise SchemaError(f"{path}: unexpected trailing columns {rest}")

    frame.columns = columns
    try:
        values = frame.apply(lambda col: pd.to_numeric(col.str.strip(), errors="raise"))
    except (ValueError, TypeError) as e:
        raise SchemaError(f"{path}: non-numeric cell ({e})") from e
    values = values.to_numpy(dtype=float)

    W = values[:, d]
    if not np.all((W == 0) | (W == 1)):
        raise SchemaError(f"{path}: column w must contain only 0 and 1")
    try:
        if not has_oracle:
            return ObservationalDataset(X=values[:, :d], W=W, Y=values[:, d + 1])
        oracle = {name: values[:, d + 2 + i] for i, name in enumerate(ORACLE_COLUMNS)}
        if not np.all((oracle["pi"] > 0) & (oracle["pi"] < 1)):
            raise SchemaError(f"{path}: column pi must lie strictly inside (0, 1)")
        return OracleDataset(
            X=values[:, :d], W=W, Y=values[:, d + 1],
            Y0=oracle["y0"], Y1=oracle["y1"], mu0=oracle["mu0"], mu1=oracle["mu1"],
            pi=oracle["pi"], tau=oracle["tau"],
        )
    except SchemaError:
        raise
    except DataError as e:
        raise SchemaError(f"{path}: {e}") from e
