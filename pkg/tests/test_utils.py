import hashlib
import sqlite3

import pytest

from utils.errors import OutputError
from utils.file_utils import FileUtils
from utils.logger import Logger


def test_logger_creates_tables(logger):
    conn = sqlite3.connect(str(logger.db_path))
    tables = {row[0] for row in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")}
    conn.close()
    assert {"run_records", "datasets"} <= tables
    assert list(logger.log_dir.glob("cate_bench_*.log"))


def test_logger_records_and_summary(logger):
    assert logger.last_record_id() == 0
    logger.log_operation("cell", "lin", 0, subject="28 estimators")
    first = logger.last_record_id()
    logger.log_operation("estimator_fit", "lin", 0, subject="R|huber|alpha=0.0001", status="failure",
                         details="did not converge")
    logger.log_operation("heterogeneity_filter", "flat", 1, status="skipped")

    records = logger.recent_records(limit=2)
    assert [r['operation_type'] for r in records] == ["heterogeneity_filter", "estimator_fit"]
    assert records[1]['details'] == "did not converge"
    failures = logger.recent_records(status="failure")
    assert [r['subject'] for r in failures] == ["R|huber|alpha=0.0001"]

    assert logger.record_summary() == {
        'cell': {'success': 1},
        'estimator_fit': {'failure': 1},
        'heterogeneity_filter': {'skipped': 1},
    }
    assert "cell" not in logger.record_summary(after_id=first)
    assert len(logger.recent_records(after_id=first)) == 2


def test_logger_dataset_rows_are_replaced(logger):
    summary = {'n': 100, 'd': 3, 'treated_fraction': 0.4, 'tau_variance': 1.2}
    logger.log_dataset("lin", 0, summary, True)
    logger.log_dataset("lin", 0, dict(summary, tau_variance=0.0), False)
    conn = sqlite3.connect(str(logger.db_path))
    rows = conn.execute("SELECT tau_variance, heterogeneous FROM datasets").fetchall()
    conn.close()
    assert rows == [(0.0, 0)]


def test_logger_reinit_does_not_duplicate_handlers(tmp_path):
    first = Logger(str(tmp_path / "a"))
    count = len(first.logger.handlers)
    second = Logger(str(tmp_path / "b"))
    assert len(second.logger.handlers) == count


def test_file_hash(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_bytes(b"seeds: [0]\n")
    assert FileUtils.calculate_file_hash(str(path)) == hashlib.sha256(b"seeds: [0]\n").hexdigest()
    assert FileUtils.calculate_file_hash(str(path), "md5") == hashlib.md5(b"seeds: [0]\n").hexdigest()


def test_list_dataset_files(tmp_path):
    for name in ("b.csv", "a.csv", "notes.txt", "nested/c.csv"):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("x0,w,y\n")
    assert [p.split("/")[-1] for p in FileUtils.list_dataset_files(str(tmp_path))] == ["a.csv", "b.csv"]
    assert len(FileUtils.list_dataset_files(str(tmp_path), recursive=True)) == 3


def test_create_directory(tmp_path):
    target = FileUtils.create_directory(str(tmp_path / "out" / "nested"))
    assert target.is_dir()
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OutputError):
        FileUtils.create_directory(str(blocker / "sub"))
