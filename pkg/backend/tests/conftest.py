"""Pytest configuration and shared fixtures for backend tests.

This module provides reusable test fixtures including:
- FastAPI test client configuration (lifespan included)
- Worked-example request bodies
"""

import sys
from pathlib import Path
from typing import Any, Dict, Iterator

import pytest
from fastapi.testclient import TestClient

# Add backend/src and the repository root to Python path for imports
backend_src_path = Path(__file__).parent.parent / "src"
repo_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(backend_src_path))
sys.path.insert(0, str(repo_root))

from api import main  # noqa: E402
from api.routes import checks  # noqa: E402

from twistkit.magnetic import EXAMPLE_B  # noqa: E402


@pytest.fixture
def test_client() -> Iterator[TestClient]:
    """Create FastAPI TestClient with rate limiting disabled.

    The client is entered as a context manager so the lifespan startup
    validation runs.

    Yields:
        TestClient instance configured with the FastAPI app
    """
    checks.limiter.enabled = False
    main.limiter.enabled = False
    with TestClient(main.app) as client:
        yield client
    checks.limiter.enabled = True
    main.limiter.enabled = True


@pytest.fixture
def example_body() -> Dict[str, Any]:
    """Request body with the worked-example magnetic field."""
    return {"n": 3, "B": EXAMPLE_B}
