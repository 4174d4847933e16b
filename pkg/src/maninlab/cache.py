"""Content-addressed disk cache for expensive scans.

Keys hash the canonical experiment inputs together with the package
version and kernel backend, so any config or code change misses cleanly.
Writes are atomic whole-file replacements; unreadable entries are
treated as misses and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

from . import __version__
from .kernels import BACKEND


def default_cache_dir() -> str:
    env = os.environ.get("MANINLAB_CACHE")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "maninlab")


class DiskCache:
    def __init__(self, directory: str | None = None, quota_bytes: int = 500 * 2**20):
        self.directory = directory or default_cache_dir()
        self.quota_bytes = quota_bytes

    def key(self, kind: str, payload: dict) -> str:
        blob = json.dumps(
            {"kind": kind, "payload": payload, "version": __version__, "backend": BACKEND},
            sort_keys=True,
            default=str,
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, key + ".json")

    def load(self, key: str):
        try:
            with open(self._path(key), "r", encoding="utf-8") as fh:
                obj = json.load(fh)
            if obj.get("key") != key:
                return None
            return obj["value"]
        except (OSError, ValueError, KeyError):
            return None

    def store(self, key: str, value) -> None:
        os.makedirs(self.directory, exist_ok=True)
        self._evict_if_needed()
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"key": key, "value": value}, fh)
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def _evict_if_needed(self) -> None:
        try:
            entries = []
            total = 0
            for name in os.listdir(self.directory):
                if not name.endswith(".json"):
                    continue
                path = os.path.join(self.directory, name)
                st = os.stat(path)
                entries.append((st.st_mtime, st.st_size, path))
                total += st.st_size
            if total <= self.quota_bytes:
                return
            for _, size, path in sorted(entries):
                try:
                    os.unlink(path)
                except OSError:
                    continue
                total -= size
                if total <= self.quota_bytes:
                    return
        except OSError:
            pass
