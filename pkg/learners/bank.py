import logging
import os
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import joblib

from datagen.dataset import ObservationalDataset
from learners.estimators import FINAL_KINDS, KINDS, SINGLETON_KINDS, CateEstimator, estimator_label, fit_estimator
from learners.nuisance import NuisanceSet
from models import RegressorSpec
from utils.errors import CateBenchError, ConfigError, EstimatorError
from utils.numerics import RngStream

logger = logging.getLogger("CateBench.learners")

DEFAULT_KINDS = ("S", "T", "projected-S", "X", "DR", "R")


@dataclass(frozen=True)
class BankEntry:
    kind: str
    final_spec: Optional[RegressorSpec]
    label: str


@dataclass
class FittedBank:
    estimators: List[CateEstimator] = field(default_factory=list)
    failures: List[Tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.estimators)

    def __iter__(self) -> Iterator[CateEstimator]:
        return iter(self.estimators)


def plan_bank(final_specs: Sequence[RegressorSpec], kinds: Sequence[str] = DEFAULT_KINDS) -> List[BankEntry]:
    """Singleton kinds first, then every final-model kind crossed with the final bank."""
    unknown = [kind for kind in kinds if kind not in KINDS]
    if unknown:
        raise ConfigError(f"Unknown estimator kind(s): {unknown}")
    entries = [BankEntry(kind, None, estimator_label(kind)) for kind in kinds if kind in SINGLETON_KINDS]
    for kind in kinds:
        if kind in FINAL_KINDS:
            entries.extend(BankEntry(kind, spec, estimator_label(kind, spec)) for spec in final_specs)

    seen = set()
    for entry in entries:
        if entry.label in seen:
            raise ConfigError(f"duplicate estimator label: {entry.label}")
        seen.add(entry.label)
    return entries


def build_bank(nuis: NuisanceSet, train: ObservationalDataset, final_specs: Sequence[RegressorSpec],
               kinds: Sequence[str] = DEFAULT_KINDS, rng: Optional[RngStream] = None) -> FittedBank:
    """Fit one estimator per bank entry; members that fail are recorded, not raised."""
    rng = rng or RngStream(0, ("bank",))
    bank = FittedBank()
    for entry in plan_bank(final_specs, kinds):
        try:
            estimator = fit_estimator(entry.kind, nuis, train, entry.final_spec, rng.child(entry.label))
            bank.estimators.append(estimator)
        except CateBenchError as e:
            logger.warning("Estimator %s failed: %s", entry.label, e)
            bank.failures.append((entry.label, str(e)))
    return bank


def save_bank(bank: FittedBank, path: str) -> str:
    """Persist a fitted bank with joblib."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    joblib.dump(bank, path)
    return path


def load_bank(path: str) -> FittedBank:
    bank = joblib.load(path)
    if not isinstance(bank, FittedBank):
        raise EstimatorError(f"{path} does not contain a fitted estimator bank")
    return bank
