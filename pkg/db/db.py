"""
Run ledger for the Grassnet engine
"""

import json
import os
import sqlite3
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional, Tuple

import config


_LEVELS = {'DEBUG': 10, 'INFO': 20, 'WARNING': 30, 'ERROR': 40}


class Database:
    def __init__(self, db_path: str = None):
        self.db_path = os.path.abspath(db_path or config.DATABASE_PATH)
        try:
            os.makedirs(os.path.dirname(self.db_path), exist_ok=True)
        except Exception:
            pass
        self.init_database()
        self._run_migrations()

    def _run_migrations(self):
        """Run additive migrations on startup"""
        try:
            from db.migrations import migrate_database
            migrate_database(self.db_path)
        except Exception as e:
            self.log('WARNING', 'Database', f'Schema migration skipped: {e}')

    def get_connection(self):
        """Get database connection"""
        conn = sqlite3.connect(self.db_path, timeout=30)
        try:
            # WAL keeps parallel CLI runs and acceptance sweeps from locking each other out.
            conn.execute("PRAGMA journal_mode = WAL")
            conn.execute("PRAGMA synchronous = NORMAL")
            conn.execute("PRAGMA foreign_keys = ON")
            conn.execute("PRAGMA busy_timeout = 5000")
        except Exception:
            pass
        conn.row_factory = sqlite3.Row  # Enable column access by name
        return conn

    @staticmethod
    def _utc_now_iso() -> str:
        """UTC ISO timestamp (seconds precision) for consistent sorting/comparisons."""
        return datetime.now(timezone.utc).replace(microsecond=0).isoformat()

    def init_database(self):
        """Initialize all tables"""
        conn = self.get_connection()
        cursor = conn.cursor()

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS system_logs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                timestamp TEXT NOT NULL,
                level TEXT NOT NULL,
                module TEXT,
                message TEXT
            )
        """)

        # One row per CLI command or acceptance sweep
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                started_at TEXT NOT NULL,
                finished_at TEXT,
                status TEXT DEFAULT 'running',
                n INTEGER,
                rank INTEGER,
                dim INTEGER,
                seed INTEGER,
                region TEXT,
                input_path TEXT,
                output_path TEXT,
                summary TEXT
            )
        """)

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS check_results (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                run_id INTEGER NOT NULL,
                kind TEXT NOT NULL,
                location TEXT,
                passed INTEGER NOT NULL,
                detail TEXT,
                FOREIGN KEY (run_id) REFERENCES runs(id)
            )
        """)

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS acceptance_results (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                created_at TEXT NOT NULL,
                criterion INTEGER NOT NULL,
                rank INTEGER,
                seeds INTEGER,
                passed INTEGER,
                failed INTEGER,
                discarded INTEGER,
                seconds REAL,
                detail TEXT
            )
        """)

        conn.commit()
        conn.close()

    # ========================================================================
    # SYSTEM LOGS
    # ========================================================================

    def log(self, level: str, module: str, message: str):
        """Insert system log (never raises)"""
        level = str(level).upper()
        threshold = _LEVELS.get(str(getattr(config, 'LOG_LEVEL', 'INFO')).upper(), 20)
        if _LEVELS.get(level, 20) < threshold:
            return
        timestamp = self._utc_now_iso()
        try:
            conn = self.get_connection()
            try:
                conn.execute(
                    "INSERT INTO system_logs (timestamp, level, module, message) VALUES (?, ?, ?, ?)",
                    (timestamp, level, module, message),
                )
                conn.commit()
            finally:
                conn.close()
        except Exception:
            pass
        if getattr(config, 'LOG_TO_FILE', False):
            try:
                with open(config.LOG_FILE_PATH, 'a', encoding='utf-8') as fh:
                    fh.write(f"{timestamp} [{level}] {module}: {message}\n")
            except Exception:
                pass

    def get_recent_logs(self, limit: int = 100) -> List[Dict]:
        """Get recent logs"""
        conn = self.get_connection()
        try:
            cursor = conn.execute(
                "SELECT * FROM system_logs ORDER BY id DESC LIMIT ?", (limit,)
            )
            return [dict(row) for row in cursor.fetchall()]
        finally:
            conn.close()

    # ========================================================================
    # RUNS
    # ========================================================================

    def start_run(self, command: str, params: Optional[Dict[str, Any]] = None) -> int:
        """Open a ledger row for a command; returns its id"""
        params = params or {}
        conn = self.get_connection()
        try:
            cursor = conn.execute(
                """
                INSERT INTO runs (command, started_at, status, n, rank, dim, seed, region,
                                  input_path, output_path, bound, workers, report_path)
                VALUES (?, ?, 'running', ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    command,
                    self._utc_now_iso(),
                    params.get('n'),
                    params.get('rank'),
                    params.get('dim'),
                    params.get('seed'),
                    params.get('region'),
                    params.get('input_path'),
                    params.get('output_path'),
                    params.get('bound'),
                    params.get('workers'),
                    params.get('report_path'),
                ),
            )
            conn.commit()
            return int(cursor.lastrowid)
        finally:
            conn.close()

    def finish_run(self, run_id: int, status: str, summary: Any = None) -> None:
        if isinstance(summary, (dict, list)):
            summary = json.dumps(summary, sort_keys=True, default=str)
        conn = self.get_connection()
        try:
            conn.execute(
                "UPDATE runs SET finished_at = ?, status = ?, summary = ? WHERE id = ?",
                (self._utc_now_iso(), status, summary, run_id),
            )
            conn.commit()
        finally:
            conn.close()

    def record_checks(self, run_id: int, kind: str, checks: Iterable[Tuple[str, bool, str]]) -> int:
        """Store (location, passed, detail) rows for one run"""
        rows = [(run_id, kind, str(loc), 1 if ok else 0, detail) for loc, ok, detail in checks]
        if not rows:
            return 0
        conn = self.get_connection()
        try:
            conn.executemany(
                "INSERT INTO check_results (run_id, kind, location, passed, detail) VALUES (?, ?, ?, ?, ?)",
                rows,
            )
            conn.commit()
            return len(rows)
        finally:
            conn.close()

    def get_run(self, run_id: int) -> Optional[Dict]:
        conn = self.get_connection()
        try:
            row = conn.execute("SELECT * FROM runs WHERE id = ?", (run_id,)).fetchone()
            return dict(row) if row else None
        finally:
            conn.close()

    def get_recent_runs(self, limit: int = 20) -> List[Dict]:
        conn = self.get_connection()
        try:
            cursor = conn.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (limit,))
            return [dict(row) for row in cursor.fetchall()]
        finally:
            conn.close()

    def get_check_results(self, run_id: int, failed_only: bool = False) -> List[Dict]:
        sql = "SELECT * FROM check_results WHERE run_id = ?"
        if failed_only:
            sql += " AND passed = 0"
        conn = self.get_connection()
        try:
            cursor = conn.execute(sql + " ORDER BY id", (run_id,))
            return [dict(row) for row in cursor.fetchall()]
        finally:
            conn.close()

    def get_run_counts(self) -> Dict[str, int]:
        """Row counts per status, plus totals for the check tables"""
        conn = self.get_connection()
        try:
            counts = {
                str(row['status']): int(row['c'])
                for row in conn.execute("SELECT status, COUNT(*) AS c FROM runs GROUP BY status")
            }
            counts['checks'] = int(conn.execute("SELECT COUNT(*) FROM check_results").fetchone()[0])
            counts['failed_checks'] = int(
                conn.execute("SELECT COUNT(*) FROM check_results WHERE passed = 0").fetchone()[0]
            )
            counts['acceptance'] = int(conn.execute("SELECT COUNT(*) FROM acceptance_results").fetchone()[0])
            return counts
        finally:
            conn.close()

    # ========================================================================
    # ACCEPTANCE
    # ========================================================================

    def insert_acceptance_result(self, result: Dict[str, Any]) -> int:
        conn = self.get_connection()
        try:
            cursor = conn.execute(
                """
                INSERT INTO acceptance_results (created_at, criterion, rank, seeds, passed, failed,
                                                discarded, seconds, detail, redraws)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    self._utc_now_iso(),
                    int(result['criterion']),
                    result.get('rank'),
                    result.get('seeds'),
                    result.get('passed'),
                    result.get('failed'),
                    result.get('discarded'),
                    result.get('seconds'),
                    result.get('detail'),
                    result.get('redraws', 0),
                ),
            )
            conn.commit()
            return int(cursor.lastrowid)
        finally:
            conn.close()

    def get_acceptance_results(self, limit: int = 200) -> List[Dict]:
        conn = self.get_connection()
        try:
            cursor = conn.execute(
                "SELECT * FROM acceptance_results ORDER BY id DESC LIMIT ?", (limit,)
            )
            return [dict(row) for row in cursor.fetchall()]
        finally:
            conn.close()


# Singleton
_db_instance = None

def get_db() -> Database:
    """Get database instance"""
    global _db_instance
    if _db_instance is None:
        _db_instance = Database()
    return _db_instance
