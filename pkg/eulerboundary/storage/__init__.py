"""Storage backends for output records"""

from eulerboundary.storage.sqlite_backend import SQLiteRecordStore

__all__ = ["SQLiteRecordStore"]
