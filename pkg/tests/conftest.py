from __future__ import annotations

import cmath
import os

import pytest
from hypothesis import settings

settings.register_profile("ci", derandomize=True, deadline=None, max_examples=60)
settings.register_profile("dev", deadline=None, max_examples=30)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def embed(a) -> complex:
    """Numeric image of a CycNum under zeta -> exp(2 pi i / n)."""
    z = cmath.exp(2j * cmath.pi / a.order)
    return sum(float(c) * z ** k for k, c in enumerate(a.coords))


@pytest.fixture
def workers(monkeypatch):
    def set_workers(k: int):
        monkeypatch.setenv("FERMATLINES_WORKERS", str(k))
    return set_workers
