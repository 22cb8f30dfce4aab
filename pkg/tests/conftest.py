import functools

import pytest

from cantor_hfun.hfun import build_pipeline


@functools.lru_cache(maxsize=None)
def _pipeline(level, basepoint, n=16):
    return build_pipeline(level, basepoint, n=n)


@pytest.fixture(scope="session")
def pipeline():
    """Cached ``build_pipeline(level, basepoint, n)``; pipelines are immutable."""
    return _pipeline
