"""Desk-scale experiments on sparse ergodic averages."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_experiment as _run_experiment


def run(config):
    """Run an experiment from a dict (or JSON string) config; returns {"summary", "csv"}."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_experiment(config)
