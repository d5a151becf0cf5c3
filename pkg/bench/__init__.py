from .aggregate import (TABLES, BenchmarkReport, aggregate, best_set, cell_statistics, normalized_pehe, rank_corr,
                        top_frequency, win_rate)
from .config import (BankConfig, BenchConfig, DatasetConfig, MetricsConfig, PropensityConfig, SelectionConfig,
                     config_from_dict, load_config)
from .report import emit, load_report, read_raw_results, render_report, summary_text
from .runner import RAW_COLUMNS, RECORD_COLUMNS, BenchmarkRunner, RawResults

__all__ = [
    'RAW_COLUMNS', 'RECORD_COLUMNS', 'TABLES',
    'BankConfig', 'BenchConfig', 'BenchmarkReport', 'BenchmarkRunner', 'DatasetConfig', 'MetricsConfig',
    'PropensityConfig', 'RawResults', 'SelectionConfig',
    'aggregate', 'best_set', 'cell_statistics', 'config_from_dict', 'emit', 'load_config', 'load_report',
    'normalized_pehe', 'rank_corr', 'read_raw_results', 'render_report', 'summary_text', 'top_frequency',
    'win_rate',
]
