"""JSON schemas for the command line outputs."""
import json
from importlib import resources


def load_schema(command: str) -> dict:
    name = command.replace(" ", "_") + ".json"
    return json.loads(resources.files("hopfnet.schemas").joinpath(name).read_text())
