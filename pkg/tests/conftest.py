"""Shared fixtures for the test suite."""

import pytest

from lambdamu.utils import ensure_recursion_limit


@pytest.fixture(autouse=True, scope="session")
def recursion_limit():
    """Raise the recursion limit the way the workbench and the CLI do."""
    return ensure_recursion_limit()
