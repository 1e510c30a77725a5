"""A tour of the feature operators and the inpainting operator.

Every constraint the library can store is a linear functional of the
image: the colour value itself, a forward difference, or a local box
mean.  This script applies each one to a corpus image, writes the
results as images, and verifies the two properties everything else
relies on: adjoint consistency and the Laplacian's null space.
"""

import pathlib

import numpy as np

from gim import (
    DEFAULT_CATALOGUE,
    GridGeometry,
    PixelGrid,
    feature_adjoint_apply,
    feature_apply,
    laplacian_apply,
    read_pnm,
    write_pnm,
)

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "demos" / "out"
OUT.mkdir(parents=True, exist_ok=True)

f = read_pnm(ROOT / "corpus" / "portrait.pgm")
geom = GridGeometry(f.width, f.height)
print(f"input: portrait.pgm ({f.width}x{f.height})")

# Apply each feature extractor.  Derivatives are signed, so we shift
# them into the visible range before writing.
for kind in DEFAULT_CATALOGUE:
    out = feature_apply(kind, geom, f.plane(0))
    display = out if kind.value.startswith("avg") or kind.value == "dirichlet" \
        else out + 128.0
    write_pnm(PixelGrid(f.width, f.height, 1, display),
              OUT / f"feature_{kind.value}.pgm")
    print(f"  {kind.value:10s} range [{out.min():8.1f}, {out.max():8.1f}]"
          f" -> out/feature_{kind.value}.pgm")

# Adjoint consistency: <A x, y> == <x, A' y> for random vectors.
rng = np.random.default_rng(0)
print("\nadjoint consistency (relative error over 5 random pairs):")
for kind in DEFAULT_CATALOGUE:
    worst = 0.0
    for _ in range(5):
        x, y = rng.normal(size=geom.pixel_count), rng.normal(size=geom.pixel_count)
        lhs = feature_apply(kind, geom, x) @ y
        rhs = x @ feature_adjoint_apply(kind, geom, y)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    print(f"  {kind.value:10s} {worst:.2e}")

# The inpainting operator: constants are invisible to it (reflecting
# boundaries), which is exactly why at least one anchoring constraint
# is needed for a unique reconstruction.
flat = laplacian_apply(geom, np.full(geom.pixel_count, 42.0))
print(f"\nlaplacian of a constant image: max |L u| = {np.abs(flat).max():.1e}")
