"""Named random streams split from one root seed.

Each consumer (environment, each agent's actions, each agent's kappa draws,
network initialisation, GameDistill) owns a stream keyed by its name, so
adding a consumer never shifts the numbers another consumer sees.
"""

import zlib
from typing import Dict

import numpy as np

STREAM_NAMES = (
    "env", "agent1", "agent2", "kappa1", "kappa2", "init1", "init2", "distill1", "distill2",
)


def stream(root_seed: int, name: str) -> np.random.Generator:
    """Generator for one named stream of a run."""
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(root_seed), key]))


class SeedStreams:
    """Lazily created, cached streams of one run."""

    def __init__(self, root_seed: int):
        self.root_seed = int(root_seed)
        self._streams: Dict[str, np.random.Generator] = {}

    def __getitem__(self, name: str) -> np.random.Generator:
        if name not in self._streams:
            self._streams[name] = stream(self.root_seed, name)
        return self._streams[name]
