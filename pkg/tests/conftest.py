import pathlib

import numpy as np
import pytest

CORPUS_DIR = pathlib.Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def corpus_paths():
    paths = sorted(CORPUS_DIR.glob("*.pgm"))
    assert len(paths) >= 4, "bundled corpus missing; run demos/00_generate_corpus.py"
    return paths
