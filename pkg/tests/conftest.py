import json

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def metric_files(tmp_path):
    """Small metric-space and bridge documents written to disk for the command-line tool."""
    docs = {
        "X": {"labels": ["a", "b", "c", "d"], "dist": [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]],
              "weights": [1, 2, 3, 4]},
        "Y": {"labels": ["y1", "y2", "y3"], "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
        "Z": {"labels": ["z1", "z2"], "dist": [[0, 3], [3, 0]]},
        "dbl": {"recipe": "doubling", "epsilon": 0.1},
        "bad": {"labels": ["p", "q", "r"], "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]},
    }
    paths = {}
    for k, v in docs.items():
        paths[k] = tmp_path / f"{k}.json"
        paths[k].write_text(json.dumps(v))
    return {k: str(v) for k, v in paths.items()}
