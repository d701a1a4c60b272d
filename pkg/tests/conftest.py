"""Pytest configuration and shared fixtures for the qna test suite."""

import tempfile
from pathlib import Path
from typing import Any

import pytest

from qna.logging_config import disable_logging
from qna.nascalar import LaurentField, PadicField
from qna.qtorus import TwistData


@pytest.fixture(autouse=True)
def quiet_logs():
    """Keep loguru quiet unless a test reconfigures it."""
    disable_logging()
    yield


@pytest.fixture(scope="session")
def test_seed() -> int:
    """Random seed for reproducible tests."""
    return 42


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


@pytest.fixture(scope="session")
def laurent() -> LaurentField:
    """Q((t)) at precision 16."""
    return LaurentField(16)


@pytest.fixture(scope="session")
def qp5() -> PadicField:
    return PadicField(5)


@pytest.fixture(scope="session")
def q_laurent(laurent):
    """q = 1 + t."""
    return laurent.default_q()


@pytest.fixture(scope="session")
def twist2(q_laurent) -> TwistData:
    """Two-variable quantum torus with z2 z1 = q z1 z2."""
    return TwistData.two_variable(q_laurent)


@pytest.fixture
def pentagon_document() -> dict[str, Any]:
    """The dx/dy dilogarithm diagram as a CLI input document."""
    return {
        "field": "laurent",
        "precision": 24,
        "q": "1+t",
        "order": 6,
        "region": ["0", "0", "10", "10"],
        "walls": {"type": "dilog", "power": 1},
        "lines": [
            {"ident": "dx", "base": ["1", "3"], "covector": [1, 0]},
            {"ident": "dy", "base": ["3", "1"], "covector": [0, 1]},
        ],
    }


@pytest.fixture
def series_document() -> dict[str, Any]:
    """``1 + t z1 + t^-1 z2^2`` on the commutative 2-torus."""
    return {
        "field": "laurent",
        "precision": 16,
        "twist": {"n": 2, "c": [], "q": "1"},
        "terms": [
            [[0, 0], "1"],
            [[1, 0], "t"],
            [[0, 2], "t**-1"],
        ],
    }


@pytest.fixture
def gl2_document() -> dict[str, Any]:
    """``t11 + 5 t12`` over Q_5 with q = 6."""
    return {
        "p": 5,
        "q": "6",
        "element": [[1, 0, 0, 0, "1"], [0, 1, 0, 0, "5"]],
        "window": 24,
    }
