"""Locate packaged lexicons and fixtures.

The default directory ships inside the package; ``CCPSEM_DATA`` overrides
it for externally maintained fixture sets.
"""

import os
from pathlib import Path

_PACKAGED = Path(__file__).parent / "data"


def data_dir() -> Path:
    override = os.environ.get("CCPSEM_DATA")
    return Path(override) if override else _PACKAGED


def data_path(name: str) -> Path:
    """Resolve `name` under the data directory, checking fixtures/ too."""
    base = data_dir()
    direct = base / name
    if direct.exists():
        return direct
    fixture = base / "fixtures" / name
    if fixture.exists():
        return fixture
    return direct
