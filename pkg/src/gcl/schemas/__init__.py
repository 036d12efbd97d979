"""Shipped JSON schemas for CLI output and experiment configs."""

import json
from importlib import resources

NAMES = ("analyze", "theory_report", "near_critical_prediction", "experiment_config")


def load(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text())
