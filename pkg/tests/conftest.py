from __future__ import annotations

import pytest

from helpers import table1_context


@pytest.fixture
def table1():
    """The six-object, five-item worked example used across the suite."""
    return table1_context()
