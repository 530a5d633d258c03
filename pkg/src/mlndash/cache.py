"""Hash-indexed materialization cache for visualization payloads.

Artifacts live at ``<root>/<kind>/<sha-of-key>.json`` with a ``.key`` sidecar
holding the canonical key (so a lost index can be rebuilt by rescanning).
Each kind keeps its own index, persisted as a binary snapshot at
``<root>/<kind>.idx``.
"""

from __future__ import annotations

import hashlib
import os
import struct
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .viz import VizRequest, canonical_key

MAGIC = b"MLNVIZIX"
VERSION = 1

KINDS = ("MAP", "TIMELINE")


class CacheError(Exception):
    pass


class CacheCorruptError(CacheError):
    pass


@dataclass
class CacheEntry:
    key: str
    artifact_path: Path
    created_at: float
    bytes: int
    hits: int = 0


class VizCache:
    """Thread-safe materialization cache with per-key single-flight generation.

    Many readers, exclusive writers; get_or_generate guarantees that
    concurrent identical misses run the generator exactly once.
    """

    def __init__(self, root: Path, max_entries: Optional[int] = None) -> None:
        self.root = Path(root)
        self.max_entries = max_entries
        self._index: dict[str, dict[str, CacheEntry]] = {k: {} for k in KINDS}
        self._lock = threading.Lock()
        self._flights: dict[str, threading.Lock] = {}
        for kind in KINDS:
            (self.root / kind).mkdir(parents=True, exist_ok=True)

    # -- lookup / store ----------------------------------------------------

    def lookup(self, key: str) -> Optional[CacheEntry]:
        kind = _kind_of(key)
        with self._lock:
            entry = self._index[kind].get(key)
            if entry is None:
                return None
            if not entry.artifact_path.exists():
                # dangling entry: artifact removed on disk, evict and miss
                del self._index[kind][key]
                return None
            entry.hits += 1
            return entry

    def store(self, key: str, payload: bytes) -> CacheEntry:
        kind = _kind_of(key)
        path = self._artifact_path(key)
        tmp = path.with_suffix(".json.tmp")
        try:
            tmp.write_bytes(payload)
            tmp.replace(path)
            key_path = path.with_suffix(".key")
            key_tmp = key_path.with_suffix(".key.tmp")
            key_tmp.write_text(key, encoding="utf-8")
            key_tmp.replace(key_path)
        except OSError as exc:
            try:
                tmp.unlink(missing_ok=True)
            except OSError:
                pass
            raise CacheError(f"cannot write artifact for {key!r}: {exc}") from exc
        entry = CacheEntry(key, path, time.time(), len(payload))
        with self._lock:
            self._index[kind][key] = entry
            if self.max_entries is not None:
                while len(self._index[kind]) > self.max_entries:
                    oldest = min(
                        self._index[kind].values(), key=lambda e: e.created_at
                    )
                    del self._index[kind][oldest.key]
        return entry

    def read(self, entry: CacheEntry) -> bytes:
        return entry.artifact_path.read_bytes()

    def get_or_generate(
        self, req: VizRequest, generator: Callable[[], bytes]
    ) -> tuple[bytes, str]:
        """Returns (payload bytes, "HIT"|"MISS"); generator runs at most once
        across concurrent identical requests."""
        key = canonical_key(req)
        entry = self.lookup(key)
        if entry is not None:
            return self.read(entry), "HIT"
        with self._lock:
            flight = self._flights.setdefault(key, threading.Lock())
        with flight:
            entry = self.lookup(key)
            if entry is not None:
                return self.read(entry), "HIT"
            payload = generator()  # failure propagates, nothing cached
            self.store(key, payload)
            return payload, "MISS"

    def invalidate(self, kind: str) -> int:
        """Drop all entries and artifacts for one visualization kind."""
        if kind not in KINDS:
            raise CacheError(f"unknown kind {kind!r}")
        with self._lock:
            removed = len(self._index[kind])
            self._index[kind] = {}
        for path in (self.root / kind).glob("*"):
            path.unlink(missing_ok=True)
        return removed

    # -- persistence -------------------------------------------------------

    def persist_index(self, kind: str) -> Path:
        path = self.root / f"{kind}.idx"
        with self._lock:
            entries = list(self._index[kind].values())
        blob = bytearray()
        blob += MAGIC
        blob += struct.pack("<BI", VERSION, len(entries))
        for e in entries:
            key_b = e.key.encode("utf-8")
            rel_b = e.artifact_path.name.encode("utf-8")
            blob += struct.pack("<H", len(key_b)) + key_b
            blob += struct.pack("<H", len(rel_b)) + rel_b
            blob += struct.pack("<dQQ", e.created_at, e.bytes, e.hits)
        tmp = path.with_suffix(".idx.tmp")
        tmp.write_bytes(bytes(blob))
        tmp.replace(path)
        return path

    def load_index(self, kind: str) -> None:
        """Load a snapshot; corruption raises CacheCorruptError (callers then
        recover via rescan)."""
        path = self.root / f"{kind}.idx"
        data = path.read_bytes()
        try:
            if data[:8] != MAGIC:
                raise CacheCorruptError(f"{path}: bad magic")
            version, count = struct.unpack_from("<BI", data, 8)
            if version != VERSION:
                raise CacheCorruptError(f"{path}: unsupported version {version}")
            off = 13
            entries: dict[str, CacheEntry] = {}
            for _ in range(count):
                (klen,) = struct.unpack_from("<H", data, off)
                off += 2
                key = data[off : off + klen].decode("utf-8")
                if len(key.encode("utf-8")) != klen:
                    raise CacheCorruptError(f"{path}: truncated record")
                off += klen
                (plen,) = struct.unpack_from("<H", data, off)
                off += 2
                name = data[off : off + plen].decode("utf-8")
                off += plen
                created_at, size, hits = struct.unpack_from("<dQQ", data, off)
                off += 24
                entries[key] = CacheEntry(
                    key, self.root / kind / name, created_at, size, hits
                )
            if off != len(data):
                raise CacheCorruptError(f"{path}: trailing bytes")
        except struct.error as exc:
            raise CacheCorruptError(f"{path}: truncated snapshot: {exc}") from exc
        with self._lock:
            self._index[kind] = entries

    def load_or_rescan(self, kind: str) -> None:
        """Load a snapshot if present and sound; otherwise rebuild the index
        from the artifact files on disk."""
        try:
            self.load_index(kind)
        except FileNotFoundError:
            self.rescan(kind)
        except CacheCorruptError:
            self.rescan(kind)

    def rescan(self, kind: str) -> int:
        """Re-index every artifact present on disk, keys from .key sidecars."""
        entries: dict[str, CacheEntry] = {}
        for artifact in sorted((self.root / kind).glob("*.json")):
            key_path = artifact.with_suffix(".key")
            if not key_path.exists():
                continue
            key = key_path.read_text(encoding="utf-8")
            stat = artifact.stat()
            entries[key] = CacheEntry(key, artifact, stat.st_mtime, stat.st_size)
        with self._lock:
            self._index[kind] = entries
        return len(entries)

    def entries(self, kind: str) -> list[CacheEntry]:
        with self._lock:
            return list(self._index[kind].values())

    def _artifact_path(self, key: str) -> Path:
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return self.root / _kind_of(key) / f"{digest}.json"


def _kind_of(key: str) -> str:
    kind = key.split("|", 1)[0]
    if kind not in KINDS:
        raise CacheError(f"key {key!r} has unknown kind")
    return kind
