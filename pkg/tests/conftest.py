import pytest

from fpx.session import explicit_session


@pytest.fixture
def session():
    """Fresh tracking session with deterministic explicit-scope traces."""
    return explicit_session()
