"""Locating and loading the bundled JSON fixtures."""

import hashlib
import json
import os
from pathlib import Path

from .errors import FixtureRequiredError

ENV_VAR = "QUATCANCEL_FIXTURES"
_BUNDLED = Path(__file__).resolve().parent / "fixtures"


def fixture_dir():
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else _BUNDLED


def fixture_path(name):
    path = fixture_dir() / name
    if not path.is_file():
        raise FixtureRequiredError(f"fixture {name!r} not found in {path.parent}")
    return path


def load_fixture(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return json.load(fh)


def fixture_hashes():
    """sha256 of every JSON fixture currently in effect, keyed by file name."""
    out = {}
    d = fixture_dir()
    if d.is_dir():
        for path in sorted(d.glob("*.json")):
            out[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out
