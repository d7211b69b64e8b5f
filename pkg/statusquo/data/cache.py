"""Run store for StatusQuo using DuckDB.

Finished seeds are stored under ``<config hash>:<seed>`` so an interrupted
experiment resumes without re-training the seeds it already has.
"""

import hashlib
import json
import logging
import pickle
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import duckdb

from .models import RunMetrics

logger = logging.getLogger(__name__)


def config_hash(fingerprint: dict) -> str:
    """SHA-256 of the canonical JSON of a config fingerprint."""
    canonical = json.dumps(fingerprint, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


class RunStore:
    """DuckDB-backed store of finished per-seed results."""

    def __init__(self, db_path: Path):
        """Initialize the store.

        Args:
            db_path: Path to the DuckDB database file
        """
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._ensure_schema()

    def _get_connection(self) -> duckdb.DuckDBPyConnection:
        """Get a DuckDB connection."""
        return duckdb.connect(str(self.db_path))

    def _ensure_schema(self):
        """Ensure the runs table exists."""
        conn = self._get_connection()
        try:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    key VARCHAR PRIMARY KEY,
                    config_hash VARCHAR,
                    seed INTEGER,
                    payload BLOB,
                    created_at TIMESTAMP
                )
            """)
            conn.commit()
        finally:
            conn.close()

    @staticmethod
    def _make_key(digest: str, seed: int) -> str:
        return f"{digest}:{seed}"

    def get(self, digest: str, seed: int) -> Optional[Any]:
        """Stored result of one seed, or None.

        Args:
            digest: Config hash
            seed: Root seed of the run

        Returns:
            The stored payload if present, None otherwise
        """
        key = self._make_key(digest, seed)
        conn = self._get_connection()
        try:
            row = conn.execute("SELECT payload FROM runs WHERE key = ?", [key]).fetchone()
            if row is None:
                logger.debug(f"Run store miss for {key}")
                return None
            logger.debug(f"Run store hit for {key}")
            return pickle.loads(row[0])
        except Exception as e:
            logger.error(f"Error reading from run store: {e}")
            return None
        finally:
            conn.close()

    def set(self, digest: str, seed: int, payload: Any):
        """Store the result of one seed, replacing any previous one."""
        key = self._make_key(digest, seed)
        try:
            blob = pickle.dumps(payload)
        except Exception as e:
            logger.error(f"Error serializing run {key}: {e}")
            return

        conn = self._get_connection()
        try:
            conn.execute("""
                INSERT OR REPLACE INTO runs (key, config_hash, seed, payload, created_at)
                VALUES (?, ?, ?, ?, ?)
            """, [key, digest, int(seed), blob, datetime.now()])
            conn.commit()
            logger.debug(f"Stored run {key}")
        except Exception as e:
            logger.error(f"Error writing to run store: {e}")
        finally:
            conn.close()

    def seeds(self, digest: str) -> List[int]:
        """Seeds already stored for a config."""
        conn = self._get_connection()
        try:
            rows = conn.execute(
                "SELECT seed FROM runs WHERE config_hash = ? ORDER BY seed", [digest]
            ).fetchall()
            return [int(r[0]) for r in rows]
        finally:
            conn.close()

    def clear(self, digest: Optional[str] = None):
        """Delete stored runs of one config, or all of them."""
        conn = self._get_connection()
        try:
            if digest is None:
                conn.execute("DELETE FROM runs")
            else:
                conn.execute("DELETE FROM runs WHERE config_hash = ?", [digest])
            conn.commit()
            logger.info(f"Cleared run store{'' if digest is None else ' for ' + digest[:12]}")
        finally:
            conn.close()

    def get_stats(self) -> Dict[str, Any]:
        """Entry counts and database size."""
        conn = self._get_connection()
        try:
            total = conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0]
            configs = conn.execute("SELECT COUNT(DISTINCT config_hash) FROM runs").fetchone()[0]
        finally:
            conn.close()
        db_size = self.db_path.stat().st_size if self.db_path.exists() else 0
        return {
            'total_entries': total,
            'configs': configs,
            'db_size_bytes': db_size,
            'db_size_mb': round(db_size / (1024 * 1024), 2),
        }


class CachedSeedRunner:
    """Wraps a per-seed training function with the run store."""

    def __init__(self, store: Optional[RunStore], digest: str):
        self.store = store
        self.digest = digest

    def lookup(self, seed: int) -> Optional[RunMetrics]:
        if self.store is None:
            return None
        cached = self.store.get(self.digest, seed)
        if cached is not None:
            logger.warning(f"Reusing stored result for seed {seed}")
        return cached

    def record(self, seed: int, metrics: RunMetrics):
        if self.store is not None:
            self.store.set(self.digest, seed, metrics)
