from __future__ import annotations

from pathlib import Path

import pytest

from tempcoll import World, parse_world

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_world(name: str) -> World:
    world, diagnostics = parse_world(fixture_text(name), source_name=name)
    assert world is not None, [d.render() for d in diagnostics]
    assert not diagnostics, [d.render() for d in diagnostics]
    return world


@pytest.fixture(scope="session")
def youth() -> World:
    return load_world("youth.tcw")


@pytest.fixture(scope="session")
def friends() -> World:
    return load_world("friends.tcw")


@pytest.fixture(scope="session")
def sitin() -> World:
    return load_world("sitin.tcw")


@pytest.fixture(scope="session")
def centuries() -> World:
    return load_world("centuries.tcw")


@pytest.fixture(scope="session")
def origins() -> World:
    return load_world("origins.tcw")


@pytest.fixture(scope="session")
def missing() -> World:
    return load_world("missing.tcw")
