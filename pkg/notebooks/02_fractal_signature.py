"""
Volumetric fractal signatures of gray-level surfaces
====================================================

A flat image dilates like a plane, rough noise fills space faster. The
signature keeps every log volume; the dimension is one summary of it.
"""

import numpy as np

from gaborvfd import fractal_dimension, fractal_signature, radius_set
from gaborvfd.imaging import GrayImage, quantize
from gaborvfd.synthetic import power_law_noise

rs = radius_set(16)
print(f"|E(16)| = {len(rs)} radii, first squares {rs.squared[:10].tolist()}")

rng = np.random.default_rng(0)
surfaces = {
    "flat": GrayImage(np.full((64, 64), 128)),
    "smooth noise": quantize(power_law_noise(64, beta=3.5, rng=rng), 256),
    "rough noise": quantize(power_law_noise(64, beta=1.0, rng=rng), 256),
    "white noise": GrayImage(rng.integers(0, 256, (64, 64))),
}

# %%
# Volumes at a few radii and the fitted dimension.
for name, img in surfaces.items():
    sig = fractal_signature(img, r_max=8)
    picks = {int(sq): int(v) for sq, v in zip(sig.squared, sig.volumes) if sq in (1, 4, 16, 64)}
    print(f"{name:13s} D = {fractal_dimension(sig):.3f}  V = {picks}")

# %%
# The flat case has a closed form: every column gains 2 floor(r) + 1 voxels.
flat = fractal_signature(surfaces["flat"], r_max=8)
expected = 64 * 64 * (2 * np.floor(flat.radii) + 1)
print("flat closed form holds:", bool(np.array_equal(flat.volumes, expected.astype(int))))

# The CSV the `vfd` subcommand prints:
print(fractal_signature(surfaces["rough noise"], r_max=3).to_csv())
