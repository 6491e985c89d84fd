import sys

import pytest

from dreamsched.utils import logger as _logger

@pytest.fixture(autouse=True)
def _reset_log_stream():
    """Detach the package log handler from a previous test's capture
    stream (already closed by pytest) so it isn't flushed again."""
    _logger.handler.stream = sys.__stderr__
    yield
