"""Bouligand-Minkowski volumetric fractal signatures of gray-level surfaces.

The surface ``{(x, y, f(x, y))}`` is embedded in a voxel grid and dilated
by balls of every radius whose square is a sum of three squares. Dilation
volumes for all radii come from one exact squared Euclidean distance
transform of the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .imaging import GrayImage

R_MAX_LIMIT = 64
DEFAULT_R_MAX = 16


@dataclass(frozen=True)
class RadiusSet:
    squared: np.ndarray  # ascending int64
    r_max: int

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.squared)

    def __len__(self):
        return len(self.squared)


def radius_set(r_max: int) -> RadiusSet:
    """Distinct radii ``sqrt(i^2 + j^2 + k^2) <= r_max`` with ``i, j, k >= 0`` not all zero."""
    if not 1 <= r_max <= R_MAX_LIMIT:
        raise ValueError(f"r_max must be in [1, {R_MAX_LIMIT}], got {r_max}")
    i = np.arange(r_max + 1) ** 2
    sums = (i[:, None, None] + i[None, :, None] + i[None, None, :]).ravel()
    sq = np.unique(sums[(sums > 0) & (sums <= r_max * r_max)])
    return RadiusSet(sq.astype(np.int64), r_max)


@njit(cache=True)
def _envelope_line(line, n, f, v, z):
    """In-place 1-D squared distance transform (Felzenszwalb-Huttenlocher).

    ``line[q] <- min_p (q - p)^2 + line[p]``; all inputs must be finite.
    """
    for q in range(n):
        f[q] = line[q]
    k = 0
    v[0] = 0
    z[0] = -np.inf
    z[1] = np.inf
    for q in range(1, n):
        fq = f[q] + q * q
        p = v[k]
        s = (fq - (f[p] + p * p)) / (2.0 * (q - p))
        # z[0] = -inf stops the pop loop
        while s <= z[k]:
            k -= 1
            p = v[k]
            s = (fq - (f[p] + p * p)) / (2.0 * (q - p))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        line[q] = (q - p) * (q - p) + f[p]


@njit(cache=True)
def _edt_planes(grid):
    """Row then column transforms of every depth plane of a ``(D, H, W)`` grid."""
    D, H, W = grid.shape
    n = max(H, W)
    f = np.empty(n, dtype=np.float64)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1, dtype=np.float64)
    for d in range(D):
        for y in range(H):
            _envelope_line(grid[d, y, :], W, f, v, z)
        for x in range(W):
            _envelope_line(grid[d, :, x], H, f, v, z)


@njit(cache=True)
def _cumulative_counts(flat, limit):
    hist = np.zeros(limit + 1, dtype=np.int64)
    for val in flat:
        if val <= limit:
            hist[val] += 1
    return np.cumsum(hist)


def edt3_squared(surface: GrayImage, r_max: int) -> np.ndarray:
    """Exact squared distance from every voxel to the embedded surface.

    Returns an integer array indexed ``[y, x, z]`` of shape
    ``(H, W, levels + 2 r_max)``; the seed of pixel ``(x, y)`` sits at depth
    ``f(x, y) + r_max`` so dilations up to ``r_max`` fit above and below
    every seed. The array is a view of depth-major storage.
    """
    if surface.levels > 256:
        raise ValueError("surface must have at most 256 levels")
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    depth = surface.levels + 2 * r_max
    seeds = surface.pixels.astype(np.int32) + r_max
    z = np.arange(depth, dtype=np.int32)
    # one seed per column: the depth pass is closed form
    grid = np.ascontiguousarray((z[:, None, None] - seeds[None, :, :]) ** 2)
    _edt_planes(grid)
    return grid.transpose(1, 2, 0)


def volumes(grid: np.ndarray, rs: RadiusSet) -> np.ndarray:
    """Voxel counts ``V[t] = #{d^2 <= squared[t]}``."""
    # counting is order-free; 'K' avoids copying transposed views
    cum = _cumulative_counts(np.ravel(grid, order="K"), int(rs.squared[-1]))
    return cum[rs.squared]


@dataclass(frozen=True)
class FractalSignature:
    r_max: int
    squared: np.ndarray
    volumes: np.ndarray
    log_volumes: np.ndarray
    source: tuple[int, int] | None = None

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.squared)

    def __len__(self):
        return len(self.log_volumes)

    def to_csv(self) -> str:
        lines = ["r,sq_r,V,lnV"]
        for sq, v, lv in zip(self.squared, self.volumes, self.log_volumes):
            lines.append(f"{math.sqrt(sq)!r},{int(sq)},{int(v)},{float(lv)!r}")
        return "\n".join(lines) + "\n"


def fractal_signature(img: GrayImage, r_max: int = DEFAULT_R_MAX,
                      source: tuple[int, int] | None = None) -> FractalSignature:
    """Natural-log dilation volumes over :func:`radius_set` radii."""
    rs = radius_set(r_max)
    V = volumes(edt3_squared(img, r_max), rs)
    return FractalSignature(r_max, rs.squared, V, np.log(V.astype(np.float64)), source)


def fractal_dimension(sig: FractalSignature) -> float:
    """``3 - slope`` of the least-squares line through ``(ln r, ln V(r))``."""
    if len(sig) < 2:
        raise ValueError("need at least two radii to fit a slope")
    slope = np.polyfit(np.log(sig.radii), sig.log_volumes, 1)[0]
    return float(3.0 - slope)
