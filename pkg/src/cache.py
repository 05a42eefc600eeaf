"""Persistent L-value cache: one line-oriented file of checksummed decimal records.

Record: digest <TAB> m <TAB> s <TAB> P <TAB> re <TAB> im <TAB> checksum, where re/im carry enough
decimal digits to reproduce the P + GUARD_BITS working value exactly. Writers append by rewriting
to a temporary file and renaming it over the old one, so readers only ever see complete files.
"""

import hashlib
import logging
import os
import tempfile
import threading
from pathlib import Path

import mpmath
from mpmath import mp

from src.config import GUARD_BITS
from src.errors import CacheCorruptionError

logger = logging.getLogger(__name__)

CACHE_FILE = "lvalues.cache"
FIELDS = 7


def decimal_digits(prec: int) -> int:
    """Digits needed to round-trip a (prec + GUARD_BITS)-bit binary value."""
    return int((prec + GUARD_BITS) * 0.30103) + 3


def _checksum(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def format_record(digest: str, m: int, s: int, prec: int, value) -> str:
    digits = decimal_digits(prec)
    with mp.workprec(prec + GUARD_BITS):
        z = mpmath.mpc(value)
        payload = "\t".join(
            [digest, str(m), str(s), str(prec), mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)]
        )
    return f"{payload}\t{_checksum(payload)}"


def parse_record(line: str) -> tuple | None:
    """(digest, m, s, prec, re_text, im_text) or None when the line fails its checksum."""
    parts = line.rstrip("\n").split("\t")
    if len(parts) != FIELDS:
        return None
    payload = "\t".join(parts[:-1])
    if _checksum(payload) != parts[-1]:
        return None
    try:
        return parts[0], int(parts[1]), int(parts[2]), int(parts[3]), parts[4], parts[5]
    except ValueError:
        return None


class ValueCache:
    """Single-writer / multi-reader store keyed by (form digest, m, s, P)."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory).expanduser()
        self.path = self.directory / CACHE_FILE
        self._lock = threading.Lock()
        self._index: dict[tuple, tuple] = {}
        self._mtime: float | None = None
        self.corrupt = 0

    def _read_lines(self) -> list[str]:
        if not self.path.exists():
            return []
        try:
            return self.path.read_text(encoding="utf-8").splitlines()
        except (OSError, UnicodeDecodeError) as e:
            raise CacheCorruptionError(f"cannot read cache file {self.path}: {e}") from e

    def _load(self) -> None:
        mtime = self.path.stat().st_mtime if self.path.exists() else None
        if mtime == self._mtime and self._index:
            return
        index: dict[tuple, tuple] = {}
        corrupt = 0
        for line in self._read_lines():
            if not line.strip():
                continue
            rec = parse_record(line)
            if rec is None:
                corrupt += 1
                continue
            digest, m, s, prec, re_text, im_text = rec
            key = (digest, m, s)
            if key not in index or index[key][0] < prec:
                index[key] = (prec, re_text, im_text)
        if corrupt:
            logger.warning("cache %s: ignored %s corrupt record(s)", self.path, corrupt)
        self._index = index
        self._mtime = mtime
        self.corrupt = corrupt

    def get(self, digest: str, m: int, s: int, prec: int):
        """Stored value at precision >= prec, else None."""
        with self._lock:
            self._load()
            hit = self._index.get((digest, m, s))
        if hit is None or hit[0] < prec:
            return None
        stored_prec, re_text, im_text = hit
        with mp.workprec(stored_prec + GUARD_BITS):
            return mpmath.mpc(re_text, im_text)

    def put_many(self, records: list[tuple]) -> None:
        """Append (digest, m, s, prec, value) records via write-to-temp and rename."""
        if not records:
            return
        lines = [format_record(*r) for r in records]
        with self._lock:
            self.directory.mkdir(parents=True, exist_ok=True)
            existing = self._read_lines()
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".lvalues.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    for line in existing + lines:
                        fh.write(line + "\n")
                os.replace(tmp, self.path)
            except OSError:
                Path(tmp).unlink(missing_ok=True)
                raise
            self._mtime = None
        logger.debug("cache %s: appended %s record(s)", self.path, len(lines))

    def stat(self) -> dict:
        with self._lock:
            self._mtime = None
            self._load()
            forms = sorted({key[0] for key in self._index})
            return {
                "path": str(self.path),
                "records": len(self._index),
                "corrupt": self.corrupt,
                "forms": len(forms),
                "bytes": self.path.stat().st_size if self.path.exists() else 0,
            }

    def gc(self) -> dict:
        """Drop corrupt lines and records superseded by a higher-precision entry for the same key."""
        with self._lock:
            lines = self._read_lines()
            best: dict[tuple, str] = {}
            best_prec: dict[tuple, int] = {}
            dropped = 0
            for line in lines:
                rec = parse_record(line) if line.strip() else None
                if rec is None:
                    dropped += 1
                    continue
                key = rec[:3]
                if key in best:
                    dropped += 1
                    if best_prec[key] >= rec[3]:
                        continue
                best[key] = line
                best_prec[key] = rec[3]
            if lines:
                fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".lvalues.", suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    for key in sorted(best):
                        fh.write(best[key] + "\n")
                os.replace(tmp, self.path)
            self._mtime = None
        logger.info("cache %s: gc kept %s, dropped %s", self.path, len(best), dropped)
        return {"kept": len(best), "dropped": dropped}
