"""Bundled example networks, stored in the DSL format."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..netmodel import Network, load_network, parse_network

# short name -> file stem
FIXTURES = {
    "full": "full",
    "g1": "g1",
    "g1r": "g1r",
    "g2": "g2",
    "calcium": "calcium",
    "calcium_reduced": "calcium_reduced",
    "processive": "processive",
    "processive_reduced": "processive_reduced",
    "processive_irreversible": "processive_irreversible",
}


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return resources.files("hopfnet.fixtures").joinpath(FIXTURES[name] + ".crn").read_text()


def fixture(name: str) -> Network:
    return parse_network(fixture_text(name))


def resolve_network(spec: str) -> Network:
    """Accept a fixture name, ``fixtures/<name>.crn``, or a path on disk."""
    p = Path(spec)
    if p.is_file():
        return load_network(p)
    stem = p.stem if p.suffix == ".crn" else spec
    if stem in FIXTURES:
        return fixture(stem)
    raise FileNotFoundError(f"no network file or fixture named {spec!r}")
