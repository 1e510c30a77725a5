"""Regenerate the bundled test-image corpus.

The four synthetic 64x64 greyscale images stand in for the classic
photographic test set: a smooth portrait, a high-contrast figure, an
architectural scene, and a piecewise-planar depth map.  Generation is
fully seeded, so the PGM files in corpus/ are byte-identical on every
run.
"""

import pathlib

from gim.synth import write_corpus

ROOT = pathlib.Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    paths = write_corpus(ROOT / "corpus", size=64)
    for path in paths:
        print(f"wrote {path}")
