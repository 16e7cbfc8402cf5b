"""Shared fixtures: small groups with hand-checked element orderings."""

from pathlib import Path

import pytest

from kernel_atomicity.catalog import cyclic, symmetric
from kernel_atomicity.config import AtomicityConfig
from kernel_atomicity.homomorphism import hom_from_table

SPECS = Path(__file__).parent / "specs"
GOLDEN = Path(__file__).parent / "golden"

# symmetric(3) enumerates as (), (0 1), (1 2), (0 1 2), (0 2 1), (0 2)
SIGN_MAP = [0, 1, 1, 0, 0, 1]
A3 = (0, 3, 4)


@pytest.fixture
def config():
    return AtomicityConfig()


@pytest.fixture
def s3(config):
    return symmetric(3, config)


@pytest.fixture
def c2(config):
    return cyclic(2, config)


@pytest.fixture
def sign(s3, c2, config):
    return hom_from_table(s3, c2, SIGN_MAP, config)


@pytest.fixture
def specs_dir():
    return SPECS


@pytest.fixture
def golden_dir():
    return GOLDEN
