import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import yaml

from datagen.dataset import DEFAULT_HETEROGENEITY_THRESHOLD, DEFAULT_SPLIT_FRACTION
from datagen.dgp import DgpSpec
from learners import DEFAULT_KINDS, KINDS
from models import (DEFAULT_EPSILON, DEFAULT_NUISANCE_CANDIDATES, DEFAULT_PROPENSITY_CANDIDATES, PropensitySpec,
                    RegressorSpec, SelectionBudget)
from scores import DEFAULT_METRICS, MetricDescriptor, ScoreOptions, expand_metrics
from utils.errors import CateBenchError, ConfigError
from utils.file_utils import FileUtils

DEFAULT_SEEDS = (0, 1, 2)


def _section(values: Any, allowed: Tuple[str, ...], where: str) -> Dict[str, Any]:
    if values is None:
        return {}
    if not isinstance(values, Mapping):
        raise ConfigError(f"{where} must be a mapping")
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    return dict(values)


@dataclass(frozen=True)
class DatasetConfig:
    id: str
    group: str
    dgp: Optional[DgpSpec] = None
    n: Optional[int] = None
    path: Optional[str] = None
    has_oracle: bool = True

    def to_dict(self) -> Dict[str, Any]:
        out = {"id": self.id, "group": self.group}
        if self.dgp is not None:
            out.update({"dgp": self.dgp.to_dict(), "n": self.n})
        else:
            out.update({"path": self.path, "has_oracle": self.has_oracle})
        return out


@dataclass(frozen=True)
class BankConfig:
    grid_size: int = 10
    kinds: Tuple[str, ...] = DEFAULT_KINDS


@dataclass(frozen=True)
class MetricsConfig:
    names: Tuple[str, ...] = DEFAULT_METRICS
    clip_alphas: Tuple[float, ...] = (0.1,)
    policy: str = "higher_is_better"
    matching: str = "corrected"

    def descriptors(self) -> List[MetricDescriptor]:
        return expand_metrics(self.names, self.clip_alphas)

    def options(self) -> ScoreOptions:
        return ScoreOptions(policy=self.policy, matching=self.matching)


@dataclass(frozen=True)
class SelectionConfig:
    max_candidates: int = 50
    cv_folds: int = 5
    candidates: Tuple[RegressorSpec, ...] = DEFAULT_NUISANCE_CANDIDATES

    def budget(self) -> SelectionBudget:
        return SelectionBudget(self.max_candidates, self.cv_folds)


@dataclass(frozen=True)
class PropensityConfig:
    epsilon: float = DEFAULT_EPSILON
    candidates: Tuple[PropensitySpec, ...] = DEFAULT_PROPENSITY_CANDIDATES


@dataclass(frozen=True)
class BenchConfig:
    datasets: Tuple[DatasetConfig, ...]
    seeds: Tuple[int, ...] = DEFAULT_SEEDS
    split_fraction: float = DEFAULT_SPLIT_FRACTION
    heterogeneity_threshold: float = DEFAULT_HETEROGENEITY_THRESHOLD
    bank: BankConfig = field(default_factory=BankConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    propensity: PropensityConfig = field(default_factory=PropensityConfig)
    output_dir: str = "results"
    log_dir: str = "logs"
    source_hash: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "datasets": [d.to_dict() for d in self.datasets],
            "seeds": list(self.seeds),
            "split_fraction": self.split_fraction,
            "heterogeneity_threshold": self.heterogeneity_threshold,
            "bank": {"grid_size": self.bank.grid_size, "kinds": list(self.bank.kinds)},
            "metrics": {**asdict(self.metrics), "names": list(self.metrics.names),
                        "clip_alphas": list(self.metrics.clip_alphas)},
            "selection": {"max_candidates": self.selection.max_candidates,
                          "cv_folds": self.selection.cv_folds,
                          "candidates": [c.to_dict() for c in self.selection.candidates]},
            "propensity": {"epsilon": self.propensity.epsilon,
                           "candidates": [c.to_dict() for c in self.propensity.candidates]},
            "output_dir": self.output_dir,
            "log_dir": self.log_dir,
        }


def _parse_datasets(items: Any, base_dir: Path) -> Tuple[DatasetConfig, ...]:
    if not isinstance(items, list) or not items:
        raise ConfigError("'datasets' must be a non-empty list")
    datasets = []
    for index, item in enumerate(items):
        where = f"datasets[{index}]"
        entry = _section(item, ("id", "group", "dgp", "n", "path", "has_oracle"), where)
        if ("dgp" in entry) == ("path" in entry):
            raise ConfigError(f"{where} needs exactly one of 'dgp' or 'path'")

        if "dgp" in entry:
            dgp_values = _section(entry["dgp"], ("family", "d", "confounding_strength", "overlap_floor",
                                                 "noise_sd", "effect_scale"), f"{where}.dgp")
            try:
                dgp = DgpSpec(**dgp_values).validate()
            except (TypeError, CateBenchError) as e:
                raise ConfigError(f"{where}.dgp: {e}") from e
            if "n" not in entry:
                raise ConfigError(f"{where} needs 'n' for a generated dataset")
            datasets.append(DatasetConfig(
                id=str(entry.get("id", f"{dgp.family}-{index}")),
                group=str(entry.get("group", dgp.family)),
                dgp=dgp, n=int(entry["n"]),
            ))
            continue

        path = Path(entry["path"])
        if not path.is_absolute():
            path = base_dir / path
        if path.is_dir():
            files = FileUtils.list_dataset_files(str(path))
            if not files:
                raise ConfigError(f"{where}: no .csv files in {path}")
        elif path.is_file():
            files = [str(path)]
        else:
            raise ConfigError(f"{where}: dataset file {path} does not exist")
        for file in files:
            stem = Path(file).stem
            datasets.append(DatasetConfig(
                id=str(entry["id"]) if "id" in entry and len(files) == 1 else stem,
                group=str(entry.get("group", "external")),
                path=file, has_oracle=bool(entry.get("has_oracle", True)),
            ))

    ids = [d.id for d in datasets]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"dataset ids must be unique, got {ids}")
    return tuple(datasets)


def config_from_dict(data: Mapping[str, Any], base_dir: Optional[Path] = None,
                     source_hash: Optional[str] = None) -> BenchConfig:
    top = _section(data, ("datasets", "seeds", "split_fraction", "heterogeneity_threshold", "bank",
                          "metrics", "selection", "propensity", "output_dir", "log_dir"), "config")
    base_dir = base_dir or Path.cwd()
    if "datasets" not in top:
        raise ConfigError("config needs a 'datasets' list")

    try:
        bank = _section(top.get("bank"), ("grid_size", "kinds"), "bank")
        metrics = _section(top.get("metrics"), ("names", "clip_alphas", "policy", "matching"), "metrics")
        selection = _section(top.get("selection"), ("max_candidates", "cv_folds", "candidates"), "selection")
        propensity = _section(top.get("propensity"), ("epsilon", "candidates"), "propensity")

        bank_cfg = BankConfig(
            grid_size=int(bank.get("grid_size", 10)),
            kinds=tuple(bank.get("kinds", DEFAULT_KINDS)),
        )
        unknown_kinds = [k for k in bank_cfg.kinds if k not in KINDS]
        if unknown_kinds or not bank_cfg.kinds:
            raise ConfigError(f"bank.kinds must be a non-empty subset of {KINDS}")
        if bank_cfg.grid_size < 1:
            raise ConfigError("bank.grid_size must be >= 1")

        metrics_cfg = MetricsConfig(
            names=tuple(metrics.get("names", DEFAULT_METRICS)),
            clip_alphas=tuple(float(a) for a in metrics.get("clip_alphas", (0.1,))),
            policy=str(metrics.get("policy", "higher_is_better")),
            matching=str(metrics.get("matching", "corrected")),
        )
        metrics_cfg.descriptors()
        metrics_cfg.options()

        candidates = selection.get("candidates")
        selection_cfg = SelectionConfig(
            max_candidates=int(selection.get("max_candidates", 50)),
            cv_folds=int(selection.get("cv_folds", 5)),
            candidates=(tuple(RegressorSpec.from_dict(c) for c in candidates)
                        if candidates else DEFAULT_NUISANCE_CANDIDATES),
        )
        selection_cfg.budget()

        prop_candidates = propensity.get("candidates")
        propensity_cfg = PropensityConfig(
            epsilon=float(propensity.get("epsilon", DEFAULT_EPSILON)),
            candidates=(tuple(PropensitySpec.from_dict(c) for c in prop_candidates)
                        if prop_candidates else DEFAULT_PROPENSITY_CANDIDATES),
        )
        if not 0 < propensity_cfg.epsilon < 0.5:
            raise ConfigError("propensity.epsilon must lie in (0, 0.5)")

        seeds = tuple(int(s) for s in top.get("seeds", DEFAULT_SEEDS))
        if not seeds:
            raise ConfigError("at least one seed is required")
        fraction = float(top.get("split_fraction", DEFAULT_SPLIT_FRACTION))
        if not 0 < fraction < 1:
            raise ConfigError("split_fraction must lie in (0, 1)")
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from e

    return BenchConfig(
        datasets=_parse_datasets(top["datasets"], base_dir),
        seeds=seeds,
        split_fraction=fraction,
        heterogeneity_threshold=float(top.get("heterogeneity_threshold", DEFAULT_HETEROGENEITY_THRESHOLD)),
        bank=bank_cfg,
        metrics=metrics_cfg,
        selection=selection_cfg,
        propensity=propensity_cfg,
        output_dir=str(top.get("output_dir", "results")),
        log_dir=str(top.get("log_dir", "logs")),
        source_hash=source_hash,
    )


def load_config(path: str) -> BenchConfig:
    """Load a YAML benchmark config; relative paths resolve against its directory."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file {path} does not exist")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path} must contain a mapping at top level")
    return config_from_dict(data, Path(path).resolve().parent, FileUtils.calculate_file_hash(path))
