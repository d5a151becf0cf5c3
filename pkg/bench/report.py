import json
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from bench.aggregate import TABLES, BenchmarkReport
from bench.runner import RAW_COLUMNS, RECORD_COLUMNS, RawResults
from utils.errors import OutputError, SchemaError
from utils.file_utils import FileUtils

FLOAT_FORMAT = "%.17g"
REPORT_FILE = "report.json"
RAW_FILE = "raw_results.csv"
RECORDS_FILE = "run_records.csv"
SUMMARY_FILE = "summary.txt"


def _json_value(value: Any) -> Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    return value


def _table_to_json(frame: pd.DataFrame) -> Dict[str, Any]:
    flat = frame.reset_index()
    return {
        'index': [str(name) for name in frame.index.names],
        'columns_name': frame.columns.name,
        'columns': [str(c) for c in flat.columns],
        'rows': [[_json_value(v) for v in row] for row in flat.itertuples(index=False, name=None)],
    }


def _table_from_json(data: Dict[str, Any]) -> pd.DataFrame:
    frame = pd.DataFrame(data['rows'], columns=data['columns'])
    index = data['index']
    for column in frame.columns:
        if column not in index:
            frame[column] = frame[column].astype(float)
    frame = frame.set_index(index)
    frame.columns.name = data.get('columns_name')
    return frame


def report_to_dict(report: BenchmarkReport) -> Dict[str, Any]:
    return {
        'meta': {k: _json_value(v) for k, v in report.meta.items()},
        'tables': {name: _table_to_json(report.table(name)) for name in TABLES},
    }


def summary_text(report: BenchmarkReport) -> str:
    """Human-readable report, one block per table."""
    lines = ["CATE Selection Benchmark Report", "=" * 50]
    meta = report.meta
    lines.append(f"Raw rows: {meta.get('n_rows', 0)}")
    lines.append(f"Cells aggregated: {meta.get('n_cells', 0)}")
    lines.append(f"Skipped cells: {meta.get('n_skipped', 0)}")
    lines.append(f"Recorded failures: {meta.get('n_failures', 0)}")
    if meta.get('config_hash'):
        lines.append(f"Config sha256: {meta['config_hash']}")
    for name in TABLES:
        lines.append("-" * 50)
        lines.append(name.replace("_", " ").title())
        table = report.table(name)
        lines.append(table.to_string(float_format=lambda v: f"{v:.4f}", na_rep="n/a") if len(table) else "(empty)")
    lines.append("=" * 50)
    return "\n".join(lines) + "\n"


def _write_text(path: Path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"Error writing {path}: {str(e)}") from e


def _write_csv(frame: pd.DataFrame, path: Path, index: bool = False):
    try:
        frame.to_csv(path, index=index, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Error writing {path}: {str(e)}") from e


def emit(raw: RawResults, report: BenchmarkReport, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write raw rows, run records, one CSV per table, report.json and summary.txt."""
    out_dir = FileUtils.create_directory(str(out_dir))
    written = {
        'raw': out_dir / RAW_FILE,
        'records': out_dir / RECORDS_FILE,
        'report': out_dir / REPORT_FILE,
        'summary': out_dir / SUMMARY_FILE,
    }
    _write_csv(raw.frame[RAW_COLUMNS], written['raw'])
    _write_csv(raw.records[RECORD_COLUMNS], written['records'])
    for name in TABLES:
        written[name] = out_dir / f"table_{name}.csv"
        _write_csv(report.table(name), written[name], index=True)

    text = json.dumps(report_to_dict(report), indent=2, allow_nan=False)
    _write_text(written['report'], text + "\n")
    _write_text(written['summary'], summary_text(report))
    return written


def read_raw_results(path: Union[str, Path], records_path: Optional[Union[str, Path]] = None) -> RawResults:
    """Read raw_results.csv (and optionally run_records.csv) back into RawResults."""
    try:
        frame = pd.read_csv(path, dtype={'dataset': str, 'group': str, 'estimator': str,
                                         'kind': str, 'metric': str}, keep_default_na=False,
                            na_values={'value': ["", "nan", "NaN"]})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise SchemaError(f"cannot read raw results {path}: {e}") from e
    if list(frame.columns) != RAW_COLUMNS:
        raise SchemaError(f"{path}: expected columns {RAW_COLUMNS}, found {list(frame.columns)}")

    records = pd.DataFrame(columns=RECORD_COLUMNS)
    if records_path is not None:
        try:
            records = pd.read_csv(records_path, dtype=str, keep_default_na=False)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise SchemaError(f"cannot read run records {records_path}: {e}") from e
        if list(records.columns) != RECORD_COLUMNS:
            raise SchemaError(f"{records_path}: expected columns {RECORD_COLUMNS}")
    return RawResults(frame=frame, records=records)


def load_report(path: Union[str, Path]) -> BenchmarkReport:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read report {path}: {e}") from e
    tables = data.get('tables', {})
    missing = [name for name in TABLES if name not in tables]
    if missing:
        raise SchemaError(f"{path}: missing table(s) {', '.join(missing)}")
    return BenchmarkReport(meta=data.get('meta', {}),
                           **{name: _table_from_json(tables[name]) for name in TABLES})


def render_table(console: Console, name: str, frame: pd.DataFrame):
    table = Table(title=name.replace("_", " ").title())
    flat = frame.reset_index()
    for i, column in enumerate(flat.columns):
        table.add_column(str(column), justify="left" if i < frame.index.nlevels else "right")
    for row in flat.itertuples(index=False, name=None):
        cells = []
        for value in row:
            if isinstance(value, (float, np.floating)):
                cells.append("n/a" if math.isnan(value) else f"{value:.3f}")
            else:
                cells.append(str(value))
        table.add_row(*cells)
    console.print(table)


def render_report(console: Console, report: BenchmarkReport, table: Optional[str] = None):
    names = [table] if table else list(TABLES)
    for name in names:
        render_table(console, name, report.table(name))
