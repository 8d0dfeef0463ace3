"""Caching support for rendered reports."""
import gzip
import hashlib
import time

from logging import getLogger
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import appdirs


log = getLogger("witt-windows")


class CacheStore:
    """A caching mechanism to store rendered reports in a local cache.

    Reports are keyed by the SHA-256 of the canonical job description and
    stored gzip-compressed. A ``cache_period`` of 0 disables the cache.
    """

    def __init__(
        self,
        cache_dir: Optional[Path] = None,
        cache_period: Optional[Union[int, float]] = None,
    ):
        if cache_dir is None:
            cache_dir = Path(appdirs.user_cache_dir("witt-windows"))
        self.cache_dir: Path = Path(cache_dir)
        if cache_period is not None:
            self.cache_period = cache_period
        else:
            self.cache_period = 0.0

        if self.cache_enabled() and not self.cache_dir.exists():
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def hash_key(key: str) -> str:
        """Returns the hash of the job description."""
        return hashlib.sha256(key.encode("utf-8")).hexdigest()

    def cache_file(self, key: str) -> Path:
        """Return the path to the cache file."""
        checksum = self.hash_key(key)
        filename = self.cache_dir / f"{checksum}.gz"
        return filename

    def cache_enabled(self) -> bool:
        """Returns true if the store should use the cache."""
        return self.cache_period > 0

    def write(self, key: str, payload: str):
        """Write a rendered report to a gzipped cache file."""
        with gzip.open(self.cache_file(key), "wb") as f:
            f.write(payload.encode("utf-8"))

    def read(self, key: str) -> Optional[str]:
        """Return the cached report for ``key`` if it is fresh, else ``None``."""
        if not self.cache_enabled():
            return None
        pth = self.cache_file(key)
        if not pth.exists():
            return None
        if pth.stat().st_mtime < time.time() - self.cache_period:
            log.warning(f"stale cache entry {pth.name}")
            return None
        with gzip.open(pth) as f:
            return f.read().decode("utf-8")

    def fetch(self, key: str, compute: Callable[[], Tuple[str, bool]]) -> Tuple[str, bool]:
        """Return ``(report, passed)`` from the cache or from ``compute``.

        Only passing reports are cached, so a cached entry always means
        ``passed``.
        """
        if not self.cache_enabled():
            return compute()
        cached = self.read(key)
        if cached is not None:
            log.info(f"report served from cache {self.cache_file(key).name}")
            return cached, True
        payload, passed = compute()
        if passed:
            self.write(key, payload)
        return payload, passed

    def clear_cache(self, mtime: Optional[Union[int, float]] = None):
        """Removes all cached files."""
        if self.cache_dir.exists():
            if mtime is None:
                self._clear_cache()
            else:
                self._clear_cache_mtime(mtime)

    def _clear_cache(self):
        """Removes all cached files."""
        for cache_file in self.cache_dir.glob("*.gz"):
            cache_file.unlink()

    def _clear_cache_mtime(self, age: Union[int, float]):
        """Removes cached files older than ``age`` seconds."""
        current_time = time.time()
        cutoff = current_time - age
        for cache_file in self.cache_dir.glob("*.gz"):
            mtime = cache_file.stat().st_mtime
            if mtime <= cutoff:
                cache_file.unlink()
