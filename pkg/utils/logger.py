import logging
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

LOGGER_NAME = "CateBench"


class Logger:
    def __init__(self, log_dir: str = "logs"):
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

        # Set up file logging
        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.setLevel(logging.INFO)
        for handler in list(self.logger.handlers):
            if getattr(handler, "_cate_bench", False):
                self.logger.removeHandler(handler)
                handler.close()

        log_file = self.log_dir / f"cate_bench_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(log_file)
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)

        log_format = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
        for handler in (file_handler, console_handler):
            handler.setFormatter(log_format)
            handler._cate_bench = True
            self.logger.addHandler(handler)

        self.db_path = self.log_dir / "cate_bench.db"
        self._init_db()

    def _init_db(self):
        """Initialize SQLite database with required tables."""
        try:
            conn = sqlite3.connect(str(self.db_path))
            cursor = conn.cursor()

            cursor.execute('''
            CREATE TABLE IF NOT EXISTS run_records (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                timestamp DATETIME DEFAULT CURRENT_TIMESTAMP,
                operation_type TEXT,
                dataset TEXT,
                seed INTEGER,
                subject TEXT,
                status TEXT,
                details TEXT
            )
            ''')

            cursor.execute('''
            CREATE TABLE IF NOT EXISTS datasets (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                dataset TEXT,
                seed INTEGER,
                n INTEGER,
                d INTEGER,
                treated_fraction REAL,
                tau_variance REAL,
                heterogeneous INTEGER,
                UNIQUE (dataset, seed)
            )
            ''')

            conn.commit()
            conn.close()
            self.logger.info("Run database initialized at %s", self.db_path)
        except Exception as e:
            self.logger.error(f"Failed to initialize database: {str(e)}")
            raise

    def log_operation(self, operation_type: str, dataset: str, seed: Optional[int] = None,
                      subject: str = "", status: str = "success", details: str = ""):
        """Log a run event to both the log file and the database."""
        level = logging.INFO if status == "success" else logging.WARNING
        self.logger.log(level, f"{operation_type}: {dataset}/{seed} {subject} ({status}) {details}".rstrip())

        conn = sqlite3.connect(str(self.db_path))
        cursor = conn.cursor()
        cursor.execute('''
        INSERT INTO run_records (operation_type, dataset, seed, subject, status, details)
        VALUES (?, ?, ?, ?, ?, ?)
        ''', (operation_type, dataset, seed, subject, status, details))
        conn.commit()
        conn.close()

    def log_dataset(self, dataset: str, seed: int, summary: Dict, heterogeneous: bool):
        """Record dataset statistics for one (dataset, seed) cell."""
        conn = sqlite3.connect(str(self.db_path))
        cursor = conn.cursor()
        cursor.execute('''
        INSERT OR REPLACE INTO datasets
        (dataset, seed, n, d, treated_fraction, tau_variance, heterogeneous)
        VALUES (?, ?, ?, ?, ?, ?, ?)
        ''', (dataset, seed, summary['n'], summary['d'], summary['treated_fraction'],
              summary.get('tau_variance'), int(heterogeneous)))
        conn.commit()
        conn.close()

    def last_record_id(self) -> int:
        """Id of the newest run record, 0 for an empty database."""
        conn = sqlite3.connect(str(self.db_path))
        (last,) = conn.execute("SELECT COALESCE(MAX(id), 0) FROM run_records").fetchone()
        conn.close()
        return int(last)

    def recent_records(self, limit: int = 20, status: Optional[str] = None, after_id: int = 0) -> List[Dict]:
        """Newest run records first, optionally only one status and only those after `after_id`."""
        query = '''
        SELECT id, operation_type, dataset, seed, subject, status, details
        FROM run_records
        WHERE id > ?
        '''
        params: list = [after_id]
        if status is not None:
            query += " AND status = ?"
            params.append(status)
        query += " ORDER BY id DESC LIMIT ?"
        params.append(limit)

        conn = sqlite3.connect(str(self.db_path))
        cursor = conn.execute(query, params)
        columns = [description[0] for description in cursor.description]
        records = [dict(zip(columns, row)) for row in cursor.fetchall()]
        conn.close()
        return records

    def record_summary(self, after_id: int = 0) -> Dict[str, Dict[str, int]]:
        """Count run records per operation and status, e.g. {'cell': {'success': 4}}."""
        conn = sqlite3.connect(str(self.db_path))
        rows = conn.execute('''
        SELECT operation_type, status, COUNT(*)
        FROM run_records
        WHERE id > ?
        GROUP BY operation_type, status
        ORDER BY operation_type, status
        ''', (after_id,)).fetchall()
        conn.close()

        summary: Dict[str, Dict[str, int]] = {}
        for operation, status, count in rows:
            summary.setdefault(operation, {})[status] = int(count)
        return summary
