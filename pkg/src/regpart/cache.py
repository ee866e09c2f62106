"""On-disk cache of computed R_l(b) series.

Each entry is a JSON sidecar (key, metadata, sha256 of the payload) next to
a binary payload of length-prefixed blocks.  Writes go through a temporary
file and an atomic rename.  An entry whose key, engine version or checksum
disagrees is treated as a miss and removed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .engine import RInfo
from .series import FracQSeries

log = logging.getLogger(__name__)

_MAGIC = b"RGPC"
_FIXED = 0      # block of little-endian int64
_BIGINT = 1     # block of (length, two's complement bytes) records


def default_cache_dir() -> Path:
    env = os.environ.get("REGPART_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_DATA_HOME") or os.path.join(os.path.expanduser("~"), ".local", "share")
    return Path(base) / "regpart"


def cache_key(req, kind: str = "R") -> dict:
    return {"kind": kind, "ell": req.ell, "b": req.b, "m": req.m, "prec": req.prec,
            "path": req.path, "engine_version": __version__}


def _encode(coeffs: np.ndarray) -> bytes:
    if coeffs.dtype == np.int64:
        body = np.ascontiguousarray(coeffs, dtype="<i8").tobytes()
        return _MAGIC + struct.pack("<BQ", _FIXED, len(coeffs)) + body
    parts = [_MAGIC, struct.pack("<BQ", _BIGINT, len(coeffs))]
    for c in coeffs:
        c = int(c)
        raw = c.to_bytes((c.bit_length() + 8) // 8 or 1, "little", signed=True)
        parts.append(struct.pack("<I", len(raw)))
        parts.append(raw)
    return b"".join(parts)


def _decode(blob: bytes) -> np.ndarray:
    if blob[:4] != _MAGIC:
        raise ValueError("bad magic")
    kind, n = struct.unpack_from("<BQ", blob, 4)
    pos = 4 + struct.calcsize("<BQ")
    if kind == _FIXED:
        body = blob[pos:]
        if len(body) != 8 * n:
            raise ValueError("truncated block")
        return np.frombuffer(body, dtype="<i8").astype(np.int64)
    if kind != _BIGINT:
        raise ValueError(f"unknown block kind {kind}")
    out = np.empty(n, dtype=object)
    for i in range(n):
        (k,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        raw = blob[pos:pos + k]
        if len(raw) != k:
            raise ValueError("truncated record")
        out[i] = int.from_bytes(raw, "little", signed=True)
        pos += k
    if pos != len(blob):
        raise ValueError("trailing bytes")
    return out


def _atomic_write(path: Path, data: bytes):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


class SeriesCache:
    """Persistent store for ``engine.set_store``."""

    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.hits = 0
        self.misses = 0

    def _paths(self, key: dict):
        digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:32]
        return self.root / f"{digest}.json", self.root / f"{digest}.bin"

    def evict(self, key: dict):
        for p in self._paths(key):
            try:
                p.unlink()
            except FileNotFoundError:
                pass

    def load(self, req):
        key = cache_key(req)
        meta_path, blob_path = self._paths(key)
        if not meta_path.exists():
            self.misses += 1
            return None
        try:
            meta = json.loads(meta_path.read_text())
            blob = blob_path.read_bytes()
            if meta.get("key") != key:
                raise ValueError("key mismatch")
            if hashlib.sha256(blob).hexdigest() != meta.get("sha256"):
                raise ValueError("checksum mismatch")
            coeffs = _decode(blob)
            if len(coeffs) != req.prec:
                raise ValueError("length mismatch")
        except (OSError, ValueError, KeyError, TypeError, struct.error) as e:
            log.warning("evicting corrupt cache entry %s: %s", meta_path.name, e)
            self.evict(key)
            self.misses += 1
            return None
        ring = req.ring
        f = FracQSeries(ring, meta["offset24"], ring.array(list(coeffs)))
        i = meta["info"]
        info = RInfo(i["path"], i["upstream"], i["status"], [tuple(x) for x in i["lifts"]])
        self.hits += 1
        return f, info

    def save(self, req, f: FracQSeries, info: RInfo):
        key = cache_key(req)
        meta_path, blob_path = self._paths(key)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            blob = _encode(f.coeffs)
            meta = {"key": key, "offset24": f.offset24, "modulus": f.ring.modulus,
                    "sha256": hashlib.sha256(blob).hexdigest(),
                    "info": {"path": info.path, "upstream": info.upstream,
                             "status": info.status, "lifts": [list(x) for x in info.lifts]}}
            # payload first, so a sidecar never points at a missing blob
            _atomic_write(blob_path, blob)
            _atomic_write(meta_path, json.dumps(meta, sort_keys=True).encode())
        except OSError as e:
            log.warning("could not write cache entry: %s", e)
