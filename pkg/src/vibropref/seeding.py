"""Deterministic RNG derivation and canonical JSON for logs and traces.

Every randomized purpose (candidate sets, recommendation pools, oracle
setup, presentation side flips, ...) gets its own generator derived from
the session seed plus a fixed integer path, e.g. (seed, STREAM_CANDIDATES,
round). Streams are created fresh at each use, so nothing about generator
state needs persisting: reloading a session and replaying a round yields
bit-identical draws.
"""

from __future__ import annotations

import json

import numpy as np

# Stream path tags. Values are part of the persistence contract: changing
# them changes every derived draw for existing seeds.
STREAM_GROUND_TRUTH = 0
STREAM_CANDIDATES = 1
STREAM_RECOMMEND_POOL = 2
STREAM_EVAL_GRID = 3
STREAM_PRESENTATION = 4
STREAM_VALIDATION = 5
STREAM_HOLDOUT = 6

_U64 = (1 << 64) - 1


def derived_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, path...); same inputs, same stream."""
    entropy = [int(seed) & _U64] + [int(p) & _U64 for p in path]
    return np.random.default_rng(entropy)


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, fixed indentation, no NaN/Inf."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
