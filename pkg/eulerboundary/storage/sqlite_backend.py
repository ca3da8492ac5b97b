"""
SQLite record store
"""

import logging
import sqlite3
from typing import Any, Dict, List, Optional

from eulerboundary.core.base import RecordBackend
from eulerboundary.core.errors import InputFormatError
from eulerboundary.utils.serialization import deserialize_data, serialize_data

logger = logging.getLogger(__name__)

COLUMN_FILTERS = ("command", "version", "seed")


class SQLiteRecordStore(RecordBackend):
    """
    Archive of OutputRecords in one SQLite file

    Example:
        >>> with SQLiteRecordStore(":memory:") as store:
        ...     rid = store.store({"command": "triangle", "version": "0.1.0", "parameters": {}, "payload": []})
        ...     store.retrieve(rid)["command"]
        'triangle'
    """

    def __init__(self, db_path: str):
        """
        Initialize SQLite record store

        Args:
            db_path: Path to SQLite database file, or ":memory:"
        """
        self.db_path = db_path
        self.conn = sqlite3.connect(db_path, check_same_thread=False)
        self.conn.row_factory = sqlite3.Row
        self._init_tables()

    def _init_tables(self) -> None:
        cursor = self.conn.cursor()
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS records (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                version TEXT NOT NULL,
                seed INTEGER,
                parameters TEXT NOT NULL,
                payload TEXT NOT NULL,
                ok INTEGER NOT NULL DEFAULT 1,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
        """)
        cursor.execute("CREATE INDEX IF NOT EXISTS idx_records_command ON records(command)")
        self.conn.commit()

    def store(self, record: Dict[str, Any]) -> int:
        """Store a record dict (command, version, seed, parameters, payload, ok)"""
        missing = [key for key in ("command", "version", "parameters", "payload") if key not in record]
        if missing:
            raise InputFormatError(f"record is missing {', '.join(missing)}")
        cursor = self.conn.cursor()
        cursor.execute(
            "INSERT INTO records (command, version, seed, parameters, payload, ok) VALUES (?, ?, ?, ?, ?, ?)",
            (
                record["command"],
                record["version"],
                record.get("seed"),
                serialize_data(record["parameters"]),
                serialize_data(record["payload"]),
                int(bool(record.get("ok", True))),
            ),
        )
        self.conn.commit()
        logger.debug("stored %s record %d", record["command"], cursor.lastrowid)
        return int(cursor.lastrowid)

    @staticmethod
    def _row_to_record(row: sqlite3.Row) -> Dict[str, Any]:
        return {
            "id": row["id"],
            "command": row["command"],
            "version": row["version"],
            "seed": row["seed"],
            "parameters": deserialize_data(row["parameters"]),
            "payload": deserialize_data(row["payload"]),
            "ok": bool(row["ok"]),
        }

    def retrieve(self, record_id: int) -> Optional[Dict[str, Any]]:
        cursor = self.conn.cursor()
        cursor.execute("SELECT * FROM records WHERE id = ?", (record_id,))
        row = cursor.fetchone()
        return self._row_to_record(row) if row else None

    def query(self, **filters) -> List[Dict[str, Any]]:
        """
        Records matching filters, oldest first

        command, version and seed are matched in SQL; any other key is
        matched against the stored parameters.
        """
        clauses, values = [], []
        for column in COLUMN_FILTERS:
            if column in filters:
                clauses.append(f"{column} = ?")
                values.append(filters[column])
        where = f" WHERE {' AND '.join(clauses)}" if clauses else ""
        cursor = self.conn.cursor()
        cursor.execute(f"SELECT * FROM records{where} ORDER BY id", values)
        result = [self._row_to_record(row) for row in cursor.fetchall()]
        for key, value in filters.items():
            if key not in COLUMN_FILTERS:
                result = [r for r in result if r["parameters"].get(key) == value]
        return result

    def delete(self, record_id: int) -> bool:
        cursor = self.conn.cursor()
        cursor.execute("DELETE FROM records WHERE id = ?", (record_id,))
        self.conn.commit()
        return cursor.rowcount > 0

    def clear(self) -> None:
        self.conn.execute("DELETE FROM records")
        self.conn.commit()

    def list_commands(self) -> List[str]:
        cursor = self.conn.cursor()
        cursor.execute("SELECT DISTINCT command FROM records ORDER BY command")
        return [row["command"] for row in cursor.fetchall()]

    def close(self) -> None:
        self.conn.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass
