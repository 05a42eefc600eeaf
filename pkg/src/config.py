"""Run configuration: environment getters (PPOLY_*) and the validated RunConfig model."""

import os
from pathlib import Path

from pydantic import BaseModel, Field, field_validator

__version__ = "0.1.0"

SCHEMA_VERSION = 1
GUARD_BITS = 32
DEFAULT_PRECISION_BITS = 256
DEFAULT_TOLERANCE = 1e-10
DEFAULT_Y_MIN = 0.05
MIN_PRECISION_BITS = 64


def get_precision_bits() -> int:
    """Working precision in bits. Default 256, never below 64."""
    v = os.environ.get("PPOLY_PRECISION_BITS", str(DEFAULT_PRECISION_BITS)).strip()
    try:
        n = int(v)
        return max(MIN_PRECISION_BITS, min(n, 1 << 16))
    except ValueError:
        return DEFAULT_PRECISION_BITS


def get_tolerance() -> float:
    """Classification tolerance. Falls back to 1e-10 when unset or outside (0, 1e-4)."""
    v = os.environ.get("PPOLY_TOLERANCE", "").strip()
    try:
        t = float(v)
    except ValueError:
        return DEFAULT_TOLERANCE
    if not 0.0 < t < 1e-4:
        return DEFAULT_TOLERANCE
    return t


def get_jobs() -> int:
    """Max worker processes for scans. Default 1."""
    v = os.environ.get("PPOLY_JOBS", "1").strip()
    try:
        n = int(v)
        return max(1, min(n, 32))
    except ValueError:
        return 1


def get_y_min() -> float:
    """Smallest Im(tau) at which q-expansions are summed directly. Default 0.05."""
    v = os.environ.get("PPOLY_Y_MIN", "").strip()
    try:
        y = float(v)
    except ValueError:
        return DEFAULT_Y_MIN
    return y if 0.0 < y <= 1.0 else DEFAULT_Y_MIN


def get_cache_dir() -> Path:
    """Directory of the persistent L-value cache (PPOLY_CACHE_DIR, default ~/.cache/ppoly)."""
    v = os.environ.get("PPOLY_CACHE_DIR", "").strip()
    if v:
        return Path(v).expanduser()
    return Path.home() / ".cache" / "ppoly"


class RunConfig(BaseModel):
    precision_bits: int = Field(default=DEFAULT_PRECISION_BITS, ge=MIN_PRECISION_BITS)
    tolerance: float = DEFAULT_TOLERANCE
    y_min: float = Field(default=DEFAULT_Y_MIN, gt=0.0, le=1.0)
    cache_dir: Path | None = None
    jobs: int = Field(default=1, ge=1, le=32)

    @field_validator("tolerance")
    @classmethod
    def _tolerance_range(cls, v: float) -> float:
        if not 0.0 < v < 1e-4:
            raise ValueError("tolerance must lie in (0, 1e-4)")
        return v

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Env defaults with explicit overrides (None values ignored)."""
        values = {
            "precision_bits": get_precision_bits(),
            "tolerance": get_tolerance(),
            "y_min": get_y_min(),
            "cache_dir": get_cache_dir(),
            "jobs": get_jobs(),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
