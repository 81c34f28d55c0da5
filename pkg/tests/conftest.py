"""Shared fixtures: the bundled .pb instances under their audit models."""

from __future__ import annotations

from pathlib import Path

import pytest

from eqshares.model import Election, UtilityModel
from eqshares.pabulib import load_election

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def reference_election() -> Election:
    """Ten approval voters, six projects, budget 1000000; cost utilities."""
    return load_election(str(FIXTURES / "reference.pb"), UtilityModel.COST)


@pytest.fixture(scope="session")
def minority_election() -> Election:
    """403 voters behind a budget-sized project, 11 behind a cheap one."""
    return load_election(str(FIXTURES / "minority.pb"), UtilityModel.COST)


@pytest.fixture(scope="session")
def tail_election() -> Election:
    """Two unit-cost projects under heavily skewed scoring ballots."""
    return load_election(str(FIXTURES / "tail.pb"), UtilityModel.SCORE)


@pytest.fixture(scope="session")
def blocks_election() -> Election:
    """700 voters behind ten shared projects, 300 singleton backers."""
    return load_election(str(FIXTURES / "blocks.pb"), UtilityModel.COST)
