"""
A Gabor dictionary and its magnitude responses
==============================================

Build the default 4x6 bank, look at the derived widths, and watch the
strongest orientation follow a rotated stripe pattern.
"""

import numpy as np

from gaborvfd import BankConfig, build_bank, derive_params, gabor_stack
from gaborvfd.gabor import PAPER_GRIDS
from gaborvfd.imaging import GrayImage
from gaborvfd.synthetic import stripes

cfg = BankConfig(scales=4, orientations=6)
p = derive_params(cfg)
print(f"scale ratio a = {p.a}, sigma_u = {p.sigma_u:.5f}, sigma_v = {p.sigma_v:.5f}")

# kernel support doubles with each scale step
bank = build_bank(cfg)
for m in range(cfg.scales):
    k = bank[m * cfg.orientations]
    print(f"scale {m}: {k.taps.shape[0]}x{k.taps.shape[1]} taps")

# every grid evaluated in the benchmark tables
for M, N in PAPER_GRIDS:
    print(f"{M}x{N}: {len(build_bank(BankConfig(M, N)))} kernels")

# %%
# Orientation selectivity. Vertical stripes vary along x, so the theta = 0
# filters respond most; rotating the image moves the peak by 90 degrees.
vertical = stripes(64, period=4, vertical=True)
horizontal = GrayImage(np.ascontiguousarray(np.rot90(vertical.pixels)))
small = BankConfig(3, 4)
for name, img in (("vertical", vertical), ("horizontal", horizontal)):
    energy = (gabor_stack(img, small).channels[0] ** 2).sum(axis=(1, 2))
    best = int(np.argmax(energy))
    print(f"{name:10s} strongest orientation: n={best} ({180 * best / small.orientations:.0f} deg)")
