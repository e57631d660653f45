from pathlib import Path

import pytest

from tlsf.frontend import parse_text

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def arbiter_source() -> str:
    return (FIXTURES / "arbiter.tlsf").read_text()


@pytest.fixture(scope="session")
def arbiter_spec(arbiter_source):
    return parse_text(arbiter_source)
