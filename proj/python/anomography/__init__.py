"""Streaming network anomography (C++ core with thin Python helpers)."""

import json

from ._core import (
    AnomoError,
    ConfigError,
    DataError,
    Dataset,
    DimensionError,
    ParameterError,
    RoutingMatrix,
    SequencingError,
    frontal_slice,
    generate_nodes,
    hankelize,
    link_count,
    roc,
    soft_threshold,
)
from . import _core

__all__ = [
    "AnomoError",
    "ConfigError",
    "DataError",
    "Dataset",
    "DimensionError",
    "ParameterError",
    "RoutingMatrix",
    "SequencingError",
    "Tracker",
    "default_config",
    "frontal_slice",
    "generate_nodes",
    "hankelize",
    "link_count",
    "roc",
    "run",
    "soft_threshold",
    "synthesize",
]


def default_config():
    """Default experiment configuration as a nested dict."""
    return json.loads(_core._default_config())


def synthesize(config=None):
    """Network, traffic, anomalies and observation mask for a config dict."""
    return _core._synthesize(json.dumps(config or default_config()))


def run(dataset, config=None):
    """Runs every configured detector; returns {algorithm: {steps, scores, auc, ...}}."""
    return _core._run(dataset, json.dumps(config or default_config()))


class Tracker:
    """Step-by-step detector over W-column link slices."""

    def __init__(self, routing, config=None, seed=0, _core_tracker=None):
        if _core_tracker is not None:
            self._t = _core_tracker
        else:
            hp = _core._hyperparams(json.dumps(config or default_config()))
            self._t = _core._Tracker(routing, hp, seed)

    @property
    def index(self):
        return self._t.index

    @property
    def state_bytes(self):
        return self._t.state_bytes

    def step(self, values, mask):
        return self._t.step(values, mask)

    def checkpoint(self):
        return json.loads(self._t.checkpoint())

    @classmethod
    def restore(cls, checkpoint):
        return cls(None, _core_tracker=_core._Tracker.restore(json.dumps(checkpoint)))
