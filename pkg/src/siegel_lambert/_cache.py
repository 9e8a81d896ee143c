"""Location of the on-disk cache for q-expansions and zero lists."""

from __future__ import annotations

import os
from pathlib import Path

CACHE_ENV = "SIEGEL_LAMBERT_CACHE"


def cache_dir() -> Path:
    """Directory from ``$SIEGEL_LAMBERT_CACHE``, else ``~/.cache/siegel_lambert``."""
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "siegel_lambert"
