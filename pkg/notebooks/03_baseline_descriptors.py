"""
Baseline descriptors over one Gabor stack
=========================================

Every comparison descriptor reduces the same 24 magnitude images. The
fractal descriptor needs fitted projections, shown in the next script.
"""

import numpy as np

from gaborvfd import BankConfig, extract, gabor_stack
from gaborvfd.descriptors import covariance_matrix, glcm, glcm_features, lbp_map
from gaborvfd.imaging import GrayImage
from gaborvfd.synthetic import brodatz_style_dataset

img = brodatz_style_dataset(n_classes=1, windows=1, win=64, source=128, seed=3).images[0]
cfg = BankConfig(4, 6)

for kind in ("energy", "variance", "percentile75", "glcm", "covariance", "lgbp"):
    fv = extract(kind, img, cfg)
    print(f"{kind:13s} length {len(fv):4d}  first entries {np.round(fv.values[:3], 4)}  ({fv.names[0]})")

# %%
# Pieces behind the vectors.
board = GrayImage(np.indices((8, 8)).sum(axis=0) % 2, 2)
ent, con, cor = glcm_features(glcm(board, 1, 0, 2))
print(f"checkerboard GLCM: entropy {ent:.2f} bits, contrast {con:.2f}, correlation {cor:.2f}")

patch = GrayImage(np.array([[0, 7, 0], [4, 5, 3], [0, 5, 0]]))
print("LBP code of the center pixel:", int(lbp_map(patch).pixels[0, 0]))

C = covariance_matrix(gabor_stack(img, cfg))
print(f"channel covariance {C.shape}, largest variance at channel {int(np.argmax(np.diag(C)))}")
