from .csv_io import read_csv, write_csv
from .dataset import (DEFAULT_HETEROGENEITY_THRESHOLD, DEFAULT_SPLIT_FRACTION, ObservationalDataset,
                      OracleDataset, SplitPair, describe, heterogeneity_ok, split)
from .dgp import FAMILIES, DgpSpec, generate

__all__ = [
    'DEFAULT_HETEROGENEITY_THRESHOLD', 'DEFAULT_SPLIT_FRACTION', 'FAMILIES', 'DgpSpec',
    'ObservationalDataset', 'OracleDataset', 'SplitPair', 'describe', 'generate',
    'heterogeneity_ok', 'read_csv', 'split', 'write_csv',
]
