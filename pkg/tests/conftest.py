"""
Shared pytest setup: project root on sys.path, the `slow` marker and a
fresh settings instance for every test
"""

import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.core.config import reset_settings  # noqa: E402
from src.utils.logging_config import SelmutLogger  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size suites (deselect with -m 'not slow')")


@pytest.fixture(autouse=True)
def fresh_settings():
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def clean_logging():
    """Undo SelmutLogger.setup() done by the code under test"""
    SelmutLogger.reset()
    yield
    SelmutLogger.reset()
