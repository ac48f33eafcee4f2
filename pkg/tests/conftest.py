from __future__ import annotations

import json
from importlib import resources

import pytest

from iotgraph.cvestore import CveStore
from iotgraph.model import SystemConfig, parse_config

FIXTURES = resources.files("iotgraph") / "fixtures"
FEED_PATH = FIXTURES / "mini_feed.json"


def load_fixture_config(name: str) -> SystemConfig:
    doc = json.loads((FIXTURES / f"{name}.json").read_text())
    return parse_config(doc, source=name)


@pytest.fixture(scope="session")
def store(tmp_path_factory: pytest.TempPathFactory) -> CveStore:
    """One CVE store for the whole run, loaded from the bundled feed."""

    root = tmp_path_factory.mktemp("cvestore")
    s = CveStore(root / "store.db")
    added, skipped = s.ingest_feed(str(FEED_PATH))
    assert added > 0 and skipped == 0
    return s


@pytest.fixture(scope="session")
def store_path(tmp_path_factory: pytest.TempPathFactory) -> str:
    """Path to an on-disk store for CLI runs."""

    root = tmp_path_factory.mktemp("clistore")
    path = root / "store.db"
    with CveStore(path) as s:
        s.ingest_feed(str(FEED_PATH))
    return str(path)


@pytest.fixture(scope="session")
def fig2_config() -> SystemConfig:
    return load_fixture_config("fig2")


@pytest.fixture(scope="session")
def system28_config() -> SystemConfig:
    return load_fixture_config("system28")


@pytest.fixture(scope="session")
def system37_config() -> SystemConfig:
    return load_fixture_config("system37")


@pytest.fixture(scope="session")
def hall_light_config() -> SystemConfig:
    return load_fixture_config("hall_light")


@pytest.fixture(scope="session")
def listing10_config() -> SystemConfig:
    return load_fixture_config("listing10")
