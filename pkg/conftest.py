#!/usr/bin/env python3
"""
Shared pytest fixtures: fixture-file loaders and a clean settings cache.
"""

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from contextuality import parse_behavior  # noqa: E402
from core_model import parse_theory, parse_theory_document  # noqa: E402
from settings import reset_settings  # noqa: E402

FIXTURES = Path(__file__).parent / 'fixtures'


@pytest.fixture(autouse=True)
def fresh_settings():
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture
def load_theory():
    return lambda name: parse_theory((FIXTURES / name).read_text())


@pytest.fixture
def load_document():
    return lambda name: parse_theory_document((FIXTURES / name).read_text())


@pytest.fixture
def load_behavior():
    return lambda name: parse_behavior((FIXTURES / name).read_text())
