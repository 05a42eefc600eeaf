"""Shared fixtures: working precisions, the discriminant and cache isolation."""

import mpmath
import pytest

from src.forms import form_coefficients
from src.lvalues import clear_cache
from src.state import FormSpec

LOW_PREC = 128
HIGH_PREC = 256


@pytest.fixture
def prec() -> int:
    return LOW_PREC


@pytest.fixture
def high_prec():
    """256 bits of target precision with mpmath's global context restored afterwards."""
    saved = mpmath.mp.prec
    yield HIGH_PREC
    mpmath.mp.prec = saved


@pytest.fixture
def delta():
    return form_coefficients(FormSpec(weight=12, kind="cusp", precision_bits=LOW_PREC))


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """No PPOLY_* variables leak in from the developer environment; cache goes to tmp_path."""
    for name in ("PPOLY_PRECISION_BITS", "PPOLY_TOLERANCE", "PPOLY_JOBS", "PPOLY_Y_MIN"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("PPOLY_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path


@pytest.fixture(autouse=True)
def _fresh_value_cache():
    clear_cache()
    yield
