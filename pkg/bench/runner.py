from dataclasses import dataclass, field
from typing import Dict, List, Optional

import pandas as pd
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from bench.config import BenchConfig, DatasetConfig
from datagen import ObservationalDataset, describe, generate, heterogeneity_ok, read_csv, split
from learners import build_bank, fit_nuisances
from models import final_model_bank
from scores import ORACLE, evaluate_metric, fit_metric_context, oracle_pehe
from utils.errors import CateBenchError, DataError
from utils.logger import Logger
from utils.numerics import RngStream

RAW_COLUMNS = ["dataset", "group", "seed", "estimator", "kind", "metric", "value", "n_used"]
RECORD_COLUMNS = ["operation", "dataset", "seed", "subject", "status", "details"]


@dataclass
class RawResults:
    """One row per (dataset, seed, estimator, metric) plus skip/failure records."""

    frame: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=RAW_COLUMNS))
    records: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=RECORD_COLUMNS))

    @property
    def n_skipped(self) -> int:
        return int((self.records["status"] == "skipped").sum())

    @property
    def n_failures(self) -> int:
        return int((self.records["status"] == "failure").sum())


class BenchmarkRunner:
    def __init__(self, config: BenchConfig, logger: Logger, console: Optional[Console] = None):
        self.config = config
        self.logger = logger
        self.console = console
        self.descriptors = config.metrics.descriptors()
        self.options = config.metrics.options()
        self.final_specs = final_model_bank(config.bank.grid_size)
        self._rows: List[Dict] = []
        self._records: List[Dict] = []

    def _record(self, operation: str, dataset: str, seed: int, subject: str = "",
                status: str = "failure", details: str = ""):
        self._records.append({
            'operation': operation, 'dataset': dataset, 'seed': seed,
            'subject': subject, 'status': status, 'details': details,
        })
        self.logger.log_operation(operation, dataset, seed, subject=subject, status=status, details=details)

    def load_dataset(self, ds_cfg: DatasetConfig, rng: RngStream) -> ObservationalDataset:
        if ds_cfg.dgp is not None:
            return generate(ds_cfg.dgp, ds_cfg.n, rng.child("generate"))
        return read_csv(ds_cfg.path, has_oracle=ds_cfg.has_oracle)

    def run(self) -> RawResults:
        """Run every (dataset, seed) cell; fully deterministic given the config."""
        self._rows, self._records = [], []
        cells = [(ds_cfg, seed) for ds_cfg in self.config.datasets for seed in self.config.seeds]

        progress = Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                            BarColumn(), console=self.console, disable=self.console is None)
        with progress:
            task = progress.add_task("Benchmarking...", total=len(cells))
            for ds_cfg, seed in cells:
                progress.update(task, description=f"{ds_cfg.id} / seed {seed}")
                self._run_cell(ds_cfg, seed)
                progress.update(task, advance=1)

        return RawResults(
            frame=pd.DataFrame(self._rows, columns=RAW_COLUMNS),
            records=pd.DataFrame(self._records, columns=RECORD_COLUMNS),
        )

    def _run_cell(self, ds_cfg: DatasetConfig, seed: int):
        config = self.config
        rng = RngStream(seed, (ds_cfg.id,))
        try:
            ds = self.load_dataset(ds_cfg, rng)
            summary = describe(ds)
        except DataError as e:
            self._record("dataset", ds_cfg.id, seed, details=str(e))
            return

        heterogeneous = (not ds.has_oracle) or heterogeneity_ok(ds, config.heterogeneity_threshold)
        self.logger.log_dataset(ds_cfg.id, seed, summary, heterogeneous)
        if not heterogeneous:
            self._record("heterogeneity_filter", ds_cfg.id, seed, status="skipped",
                         details=f"tau variance {summary['tau_variance']:.3g} < {config.heterogeneity_threshold}")
            return

        try:
            pair = split(ds, config.split_fraction, rng.child("split"))
        except DataError as e:
            self._record("split", ds_cfg.id, seed, details=str(e))
            return
        budget = config.selection.budget()
        try:
            nuisances = fit_nuisances(pair.train, config.bank.kinds, config.selection.candidates,
                                      config.propensity.candidates, budget, rng.child("estimator-nuisance"),
                                      config.propensity.epsilon)
            context = fit_metric_context(pair.train, config.selection.candidates, config.propensity.candidates,
                                         budget, rng.child("metric-nuisance"), config.propensity.epsilon)
            bound = context.bind(pair.val)
        except CateBenchError as e:
            self._record("nuisance_fit", ds_cfg.id, seed, details=str(e))
            return

        bank = build_bank(nuisances, pair.train, self.final_specs, config.bank.kinds, rng.child("bank"))
        for label, reason in bank.failures:
            self._record("estimator_fit", ds_cfg.id, seed, subject=label, details=reason)

        for estimator in bank:
            try:
                tau_hat = estimator.predict_cate(pair.val.X)
            except CateBenchError as e:
                self._record("estimator_predict", ds_cfg.id, seed, subject=estimator.label, details=str(e))
                continue
            self._score_estimator(ds_cfg, seed, estimator, tau_hat, pair.val, bound)

        self._record("cell", ds_cfg.id, seed, subject=f"{len(bank)} estimators", status="success")

    def _score_estimator(self, ds_cfg, seed, estimator, tau_hat, val, bound):
        base = {'dataset': ds_cfg.id, 'group': ds_cfg.group, 'seed': seed,
                'estimator': estimator.label, 'kind': estimator.kind}
        for descriptor in self.descriptors:
            if descriptor.base == ORACLE:
                if val.has_oracle:
                    self._rows.append({**base, 'metric': ORACLE,
                                       'value': oracle_pehe(tau_hat, val.tau), 'n_used': val.n})
                continue
            try:
                score = evaluate_metric(descriptor, tau_hat, bound, estimator.label, self.options)
            except CateBenchError as e:
                self._record("score", ds_cfg.id, seed, subject=f"{estimator.label} {descriptor.name}",
                             details=str(e))
                continue
            self._rows.append({**base, 'metric': score.metric, 'value': score.value, 'n_used': score.n_used})
