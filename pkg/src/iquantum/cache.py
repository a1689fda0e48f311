"""On-disk cache of serialized realizations.

Entries live at ``<dir>/<key>.real``.  The first line is ``sha256 <hex>`` over
the remaining bytes; a mismatch means the entry is corrupt and gets rebuilt.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .repmod import WeightModuleRealization, build_irreducible, parse_realization, render_realization
from .repmod.serialize import FORMAT_VERSION
from .rootdata import SatakeDatum

log = logging.getLogger(__name__)

ENV_VAR = "IQUANTUM_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "iquantum"


def cache_key(satake: SatakeDatum, lam: Sequence[int]) -> str:
    h = hashlib.sha256()
    h.update(satake.canonical_text().encode())
    h.update(b"\0lambda " + " ".join(map(str, lam)).encode())
    h.update(b"\0" + FORMAT_VERSION.encode())
    return h.hexdigest()


@dataclass
class CacheEntry:
    key: str
    path: Path
    checksum: str
    dim: int
    rebuilt: bool = False


class RealizationCache:
    def __init__(self, directory: Optional[os.PathLike] = None):
        self.dir = Path(directory) if directory is not None else default_cache_dir()

    def path(self, key: str) -> Path:
        return self.dir / f"{key}.real"

    def _write(self, key: str, body: str) -> str:
        self.dir.mkdir(parents=True, exist_ok=True)
        digest = hashlib.sha256(body.encode()).hexdigest()
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=f".{key[:16]}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(f"sha256 {digest}\n")
                fh.write(body)
            os.replace(tmp, self.path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return digest

    def _read(self, key: str) -> Optional[Tuple[str, str]]:
        """(checksum, body) when the entry exists and is intact."""
        p = self.path(key)
        if not p.exists():
            return None
        raw = p.read_text(encoding="utf-8")
        head, _, body = raw.partition("\n")
        if not head.startswith("sha256 ") or hashlib.sha256(body.encode()).hexdigest() != head[7:]:
            log.warning("cache entry %s is corrupt; rebuilding", p)
            return None
        return head[7:], body

    def build(self, satake: SatakeDatum, lam: Sequence[int], cap_dim: Optional[int] = None) -> CacheEntry:
        key = cache_key(satake, lam)
        V = build_irreducible(satake, tuple(lam), cap_dim)
        digest = self._write(key, render_realization(V, satake.digest()))
        return CacheEntry(key, self.path(key), digest, V.dim, rebuilt=True)

    def load(self, satake: SatakeDatum, lam: Sequence[int],
             cap_dim: Optional[int] = None) -> Tuple[WeightModuleRealization, CacheEntry]:
        """Cached realization, rebuilding a missing or corrupt entry."""
        key = cache_key(satake, lam)
        got = self._read(key)
        if got is not None:
            try:
                real = parse_realization(got[1], satake.root)
                return real, CacheEntry(key, self.path(key), got[0], real.dim)
            except Exception as e:  # checksum ok but unreadable, e.g. foreign format
                log.warning("cache entry %s is unreadable (%s); rebuilding", self.path(key), e)
        entry = self.build(satake, lam, cap_dim)
        real = parse_realization(self._read(key)[1], satake.root)
        return real, entry

    def inspect(self, satake: SatakeDatum, lam: Sequence[int]) -> Optional[CacheEntry]:
        key = cache_key(satake, lam)
        got = self._read(key)
        if got is None:
            return None
        dim = next(int(line.split()[1]) for line in got[1].splitlines() if line.startswith("dim "))
        return CacheEntry(key, self.path(key), got[0], dim)

    def purge(self, satake: Optional[SatakeDatum] = None, lam: Optional[Sequence[int]] = None) -> int:
        """Remove one entry, or every entry when no key is given; returns the count."""
        if satake is not None and lam is not None:
            p = self.path(cache_key(satake, lam))
            if p.exists():
                p.unlink()
                return 1
            return 0
        if not self.dir.exists():
            return 0
        n = 0
        for p in self.dir.glob("*.real"):
            p.unlink()
            n += 1
        return n
