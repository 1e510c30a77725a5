"""Optimising the stored values instead of only their locations.

The values that interpolate the original image are not the values that
reconstruct it best: letting every stored number float and solving the
least-squares problem over the reconstruction map cuts the error by
roughly a third at no extra storage cost.  The solve is matrix-free
conjugate gradients on the normal equations, with every operator product
an inner saddle solve.
"""

import pathlib

import numpy as np

from gim import (
    DEFAULT_CATALOGUE,
    DensifyConfig,
    TonalConfig,
    densify,
    read_pnm,
    tonal_optimise,
    write_pnm,
)

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "demos" / "out"
OUT.mkdir(parents=True, exist_ok=True)

f = read_pnm(ROOT / "corpus" / "depth.pgm")
n = f.width * f.height
target = round(0.05 * n)
print(f"input: depth.pgm, 5% density ({target} points)")

result = densify(f, DEFAULT_CATALOGUE,
                 DensifyConfig(target_points=target, iterations=12))
print(f"after densification: mse {result.trace[-1]['mse']:.2f}")

tonal = tonal_optimise(f, result.masks, result.values,
                       TonalConfig(outer_max_iterations=30))
reduction = 100.0 * (1.0 - tonal.mse_after / tonal.mse_before)
print(f"after tonal optimisation: mse {tonal.mse_before:.2f} -> "
      f"{tonal.mse_after:.2f} ({reduction:.0f}% lower)")

write_pnm(tonal.reconstruction, OUT / "tonal_after.pgm")

# The optimised values no longer interpolate the image's own features.
changed = np.abs(tonal.values - result.values)
sup = result.masks.support()
print(f"stored values moved by up to {changed[0][sup].max():.1f} "
      f"(mean {changed[0][sup].mean():.2f}) away from the interpolating ones")
print("reconstruction -> out/tonal_after.pgm")
