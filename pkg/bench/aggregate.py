"""Aggregate raw benchmark rows into the comparison tables.

Per (dataset, seed) cell each metric selects its best estimators; the mean
oracle PEHE of that set is compared with the oracle's own best set. Cell
statistics are averaged over seeds, then over the datasets of a group.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from bench.runner import RawResults
from scores import MAXIMIZE, ORACLE, describe_metric
from utils.numerics import spearman

logger = logging.getLogger("CateBench.bench")

TABLES = ("normalized_pehe", "absolute_pehe", "win_rate", "rank_corr", "top_frequency")


@dataclass
class BenchmarkReport:
    normalized_pehe: pd.DataFrame
    absolute_pehe: pd.DataFrame
    win_rate: pd.DataFrame
    rank_corr: pd.DataFrame
    top_frequency: pd.DataFrame
    meta: Dict = field(default_factory=dict)

    def table(self, name: str) -> pd.DataFrame:
        if name not in TABLES:
            raise KeyError(f"Unknown table: {name}")
        return getattr(self, name)


def best_set(values: pd.Series, orientation: str) -> List[str]:
    """Labels attaining the optimum of one metric column (exact ties kept)."""
    values = values.dropna()
    if values.empty:
        return []
    target = values.max() if orientation == MAXIMIZE else values.min()
    return sorted(values.index[values == target])


def normalized_pehe(metric_pehe: float, oracle_pehe: float) -> float:
    """Relative PEHE increase over the oracle's choice; NaN when the oracle PEHE is 0."""
    if not oracle_pehe > 0:
        return math.nan
    return (metric_pehe - oracle_pehe) / oracle_pehe


def win_rate(pehes: Mapping[str, float]) -> Dict[str, float]:
    """Fraction of other metrics whose chosen PEHE is not lower; ties count for both."""
    names = list(pehes)
    if len(names) < 2:
        return {name: math.nan for name in names}
    return {
        m: sum(pehes[m] <= pehes[other] for other in names if other != m) / (len(names) - 1)
        for m in names
    }


def rank_corr(metric_values, oracle_values, orientation: str) -> float:
    """Spearman correlation with the oracle; maximize-metrics are negated first."""
    metric_values = np.asarray(metric_values, dtype=float)
    sign = -1.0 if orientation == MAXIMIZE else 1.0
    try:
        return spearman(sign * metric_values, oracle_values)
    except ValueError as e:
        logger.info("rank correlation undefined: %s", e)
        return math.nan


def _ordered_unique(values) -> list:
    return list(dict.fromkeys(values))


def cell_statistics(frame: pd.DataFrame) -> pd.DataFrame:
    """Per (dataset, seed, metric): absolute/normalized PEHE, win rate, rank correlation."""
    rows = []
    for (dataset, seed), cell in frame.groupby(["dataset", "seed"], sort=False):
        group = cell["group"].iloc[0]
        pivot = cell.pivot(index="estimator", columns="metric", values="value")
        if ORACLE not in pivot:
            continue
        oracle = pivot[ORACLE].dropna()
        metrics = _ordered_unique(cell["metric"])

        pehes, corrs = {}, {}
        for metric in metrics:
            orientation = describe_metric(metric).orientation
            values = pivot[metric].reindex(oracle.index).dropna()
            chosen = best_set(values, orientation)
            if not chosen:
                continue
            pehes[metric] = float(oracle[chosen].mean())
            corrs[metric] = rank_corr(values.to_numpy(), oracle[values.index].to_numpy(), orientation)

        if ORACLE not in pehes:
            continue
        oracle_best = pehes[ORACLE]
        wins = win_rate({m: p for m, p in pehes.items() if m != ORACLE})
        for metric, pehe in pehes.items():
            rows.append({
                'dataset': dataset, 'group': group, 'seed': seed, 'metric': metric,
                'absolute_pehe': pehe,
                'normalized_pehe': normalized_pehe(pehe, oracle_best),
                'win_rate': wins.get(metric, math.nan),
                'rank_corr': corrs[metric],
            })
    return pd.DataFrame(rows, columns=["dataset", "group", "seed", "metric", "absolute_pehe",
                                       "normalized_pehe", "win_rate", "rank_corr"])


def _group_table(cells: pd.DataFrame, column: str, metrics: list, groups: list) -> pd.DataFrame:
    per_dataset = cells.groupby(["group", "dataset", "metric"], sort=False)[column].mean().reset_index()
    per_group = per_dataset.groupby(["group", "metric"], sort=False)[column].mean().reset_index()
    table = per_group.pivot(index="metric", columns="group", values=column)
    return table.reindex(index=metrics, columns=groups)


def top_frequency(raw: RawResults) -> pd.DataFrame:
    """Share of each estimator kind in every metric's best set, per group."""
    frame = raw.frame
    kinds = _ordered_unique(frame["kind"])
    shares = []
    for (dataset, seed), cell in frame.groupby(["dataset", "seed"], sort=False):
        kind_of = cell.drop_duplicates("estimator").set_index("estimator")["kind"]
        pivot = cell.pivot(index="estimator", columns="metric", values="value")
        if ORACLE in pivot:
            pivot = pivot[pivot[ORACLE].notna()]
        for metric in _ordered_unique(cell["metric"]):
            chosen = best_set(pivot[metric], describe_metric(metric).orientation)
            if not chosen:
                continue
            row = dict.fromkeys(kinds, 0.0)
            for label in chosen:
                row[kind_of[label]] += 1.0 / len(chosen)
            shares.append({'group': cell["group"].iloc[0], 'dataset': dataset, 'seed': seed,
                           'metric': metric, **row})

    columns = ["group", "metric"] + kinds
    if not shares:
        return pd.DataFrame(columns=columns).set_index(["group", "metric"])
    shares = pd.DataFrame(shares)
    per_dataset = shares.groupby(["group", "dataset", "metric"], sort=False)[kinds].mean().reset_index()
    return per_dataset.groupby(["group", "metric"], sort=False)[kinds].mean()


def aggregate(raw: RawResults, config_hash: Optional[str] = None) -> BenchmarkReport:
    frame = raw.frame
    cells = cell_statistics(frame)
    metrics = _ordered_unique(frame["metric"])
    groups = _ordered_unique(frame["group"])
    non_oracle = [m for m in metrics if m != ORACLE]

    return BenchmarkReport(
        normalized_pehe=_group_table(cells, "normalized_pehe", non_oracle, groups),
        absolute_pehe=_group_table(cells, "absolute_pehe", metrics, groups),
        win_rate=_group_table(cells, "win_rate", non_oracle, groups),
        rank_corr=_group_table(cells, "rank_corr", metrics, groups),
        top_frequency=top_frequency(raw),
        meta={
            'n_rows': int(len(frame)),
            'n_cells': int(cells[["dataset", "seed"]].drop_duplicates().shape[0]) if len(cells) else 0,
            'n_skipped': raw.n_skipped,
            'n_failures': raw.n_failures,
            'config_hash': config_hash,
        },
    )
