"""Baseline descriptors computed over Gabor magnitude stacks.

First-order histogram statistics, co-occurrence (GLCM) features, region
covariance from integral images, and 4-neighbour LBP histograms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .gabor import GaborStack
from .imaging import GrayImage, quantize

FIRST_ORDER = ("energy", "variance", "percentile75")
GLCM_ANGLES = (0, 45, 90, 135)
GLCM_LEVELS = 64
STAT_LEVELS = 256
LBP_BINS = 16

# Q tensors larger than this fall back to summing the full window directly.
INTEGRAL_BUDGET_BYTES = 256 * 2 ** 20


@dataclass
class FeatureVector:
    """Feature values plus a name for every entry.

    ``names[i]`` is ``"m{m}n{n}:{feature}"`` for per-channel features.
    """

    values: np.ndarray
    names: list[str]
    descriptor: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or len(self.names) != len(self.values):
            raise ValueError("values and names must be 1-D and of equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.descriptor}: non-finite feature values")

    def __len__(self):
        return len(self.values)


def _channel_tag(mn) -> str:
    return f"m{mn[0]}n{mn[1]}"


def write_feature_csv(path, rows) -> None:
    """Write ``(sample_id, label, FeatureVector)`` rows as
    ``sample_id,label,descriptor,v0,v1,...``."""
    rows = list(rows)
    width = max((len(fv) for _, _, fv in rows), default=0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "label", "descriptor"] + [f"v{i}" for i in range(width)])
        for sid, label, fv in rows:
            w.writerow([sid, label, fv.descriptor] + [repr(float(v)) for v in fv.values])


def read_feature_csv(path) -> list[tuple[str, str, str, np.ndarray]]:
    out = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            vals = np.array([float(v) for v in row[3:] if v != ""])
            out.append((row[0], row[1], row[2], vals))
    return out


# -- first-order statistics -------------------------------------------------

def histogram(img: GrayImage) -> np.ndarray:
    """Density ``p(i) = h(i) / (W H)`` over ``img.levels`` bins."""
    counts = np.bincount(img.pixels.ravel(), minlength=img.levels)
    return counts / img.pixels.size


def first_order(p: np.ndarray, which: str) -> float:
    """Energy, variance, or the 75th entry of the sorted density.

    ``percentile75`` returns ``sort(p)[ceil(0.75 (G - 1))]``: an entry of the
    ascending-sorted density vector, not an intensity percentile.
    """
    p = np.asarray(p, dtype=np.float64)
    G = len(p)
    if which == "energy":
        return float(np.sum(p * p))
    if which == "variance":
        i = np.arange(G)
        u = np.sum(i * p)
        return float(np.sum((i - u) ** 2 * p))
    if which == "percentile75":
        return float(np.sort(p)[math.ceil(0.75 * (G - 1))])
    raise ValueError(f"unknown first-order statistic {which!r}")


def stat_features(stack: GaborStack, which: str) -> FeatureVector:
    vals, names = [], []
    for mn, ch in stack.items():
        vals.append(first_order(histogram(quantize(ch, STAT_LEVELS)), which))
        names.append(f"{_channel_tag(mn)}:{which}")
    return FeatureVector(np.array(vals), names, which)


# -- co-occurrence ----------------------------------------------------------

@dataclass(frozen=True)
class Glcm:
    matrix: np.ndarray  # (levels, levels), symmetric, sums to 1
    d: int
    theta: int

    @property
    def levels(self) -> int:
        return self.matrix.shape[0]


def glcm_offset(d: int, theta: int) -> tuple[int, int]:
    """Pixel offset ``(dx, dy)`` for distance ``d`` at ``theta`` degrees.

    Angles are measured counter-clockwise with image rows growing downward,
    so 90 degrees points to the row above.
    """
    if theta not in GLCM_ANGLES:
        raise ValueError(f"theta must be one of {GLCM_ANGLES}")
    rad = math.radians(theta)
    return round(d * math.cos(rad)), -round(d * math.sin(rad))


def requantize(img: GrayImage, levels: int) -> np.ndarray:
    if img.levels == levels:
        return img.pixels
    return (img.pixels.astype(np.int64) * levels) // img.levels


def glcm(img: GrayImage, d: int, theta: int, levels: int) -> Glcm:
    """Symmetric, normalized co-occurrence matrix at one offset."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if levels < 2:
        raise ValueError("levels must be >= 2")
    dx, dy = glcm_offset(d, theta)
    q = requantize(img, levels)
    H, W = q.shape
    if abs(dx) >= W or abs(dy) >= H:
        raise ValueError(f"image {W}x{H} is smaller than the offset ({dx},{dy})")
    a = q[max(0, -dy):H - max(0, dy), max(0, -dx):W - max(0, dx)]
    b = q[max(0, dy):H - max(0, -dy), max(0, dx):W - max(0, -dx)]
    pairs = np.bincount((a * levels + b).ravel(), minlength=levels * levels)
    m = pairs.reshape(levels, levels).astype(np.float64)
    m = m + m.T
    return Glcm(m / m.sum(), d, theta)


def glcm_features(g: Glcm) -> tuple[float, float, float]:
    """Entropy (bits), contrast and correlation of a co-occurrence matrix.

    Correlation is ``(sum_ij i j p - mu_x mu_y) / (sigma_x sigma_y)`` and is
    defined as 0 when either marginal has zero spread.
    """
    p = g.matrix
    nz = p[p > 0]
    ent = float(-np.sum(nz * np.log2(nz)))
    i = np.arange(g.levels, dtype=np.float64)
    con = float(np.sum((i[:, None] - i[None, :]) ** 2 * p))
    px, py = p.sum(axis=1), p.sum(axis=0)
    mux, muy = np.sum(i * px), np.sum(i * py)
    sx = math.sqrt(np.sum((i - mux) ** 2 * px))
    sy = math.sqrt(np.sum((i - muy) ** 2 * py))
    if sx * sy == 0:
        cor = 0.0
    else:
        cor = float((np.sum(np.outer(i, i) * p) - mux * muy) / (sx * sy))
    return ent, con, cor


def glcm_features_stack(stack: GaborStack, levels: int = GLCM_LEVELS, d: int = 1) -> FeatureVector:
    """Angle-averaged entropy, contrast, correlation per channel."""
    vals, names = [], []
    for mn, ch in stack.items():
        q = quantize(ch, levels)
        feats = np.mean([glcm_features(glcm(q, d, t, levels)) for t in GLCM_ANGLES], axis=0)
        vals.extend(feats)
        names.extend(f"{_channel_tag(mn)}:{f}" for f in ("entropy", "contrast", "correlation"))
    return FeatureVector(np.array(vals), names, "glcm")


# -- region covariance ------------------------------------------------------

def integral_tensors(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First- and second-order integral images of a ``(K, H, W)`` feature image.

    ``P[y, x, i]`` sums ``F_i`` over rows ``< y`` and columns ``< x``;
    ``Q[y, x, i, j]`` does the same for ``F_i F_j``. Both carry a zero
    leading row and column.
    """
    F = np.moveaxis(np.asarray(features, dtype=np.float64), 0, -1)  # (H, W, K)
    H, W, K = F.shape
    P = np.zeros((H + 1, W + 1, K))
    P[1:, 1:] = F.cumsum(0).cumsum(1)
    Q = np.zeros((H + 1, W + 1, K, K))
    Q[1:, 1:] = (F[..., :, None] * F[..., None, :]).cumsum(0).cumsum(1)
    return P, Q


def window_covariance(P: np.ndarray, Q: np.ndarray, x0: int, y0: int, x1: int, y1: int) -> np.ndarray:
    """Covariance over columns ``[x0, x1)`` and rows ``[y0, y1)`` from integral tensors."""
    n = (x1 - x0) * (y1 - y0)
    if n < 2:
        raise ValueError("covariance needs at least two pixels")
    p = P[y1, x1] + P[y0, x0] - P[y0, x1] - P[y1, x0]
    q = Q[y1, x1] + Q[y0, x0] - Q[y0, x1] - Q[y1, x0]
    return (q - np.outer(p, p) / n) / (n - 1)


def covariance_matrix(stack: GaborStack) -> np.ndarray:
    F = stack.flat()
    K, H, W = F.shape
    if H * W < 2:
        raise ValueError("covariance needs at least two pixels")
    # shifting each channel by its mean leaves the covariance unchanged and
    # keeps the one-pass formula away from cancellation
    F = F - F.mean(axis=(1, 2), keepdims=True)
    if (H + 1) * (W + 1) * K * K * 8 <= INTEGRAL_BUDGET_BYTES:
        P, Q = integral_tensors(F)
        C = window_covariance(P, Q, 0, 0, W, H)
    else:
        flat = F.reshape(K, -1)
        n = flat.shape[1]
        p = flat.sum(axis=1)
        C = (flat @ flat.T - np.outer(p, p) / n) / (n - 1)
    return 0.5 * (C + C.T)


def covariance_features(stack: GaborStack) -> FeatureVector:
    """Upper triangle (row-major, diagonal included) of the channel covariance."""
    C = covariance_matrix(stack)
    K = C.shape[0]
    iu = np.triu_indices(K)
    tags = [_channel_tag(mn) for mn, _ in stack.items()]
    names = [f"cov:{tags[i]}:{tags[j]}" for i, j in zip(*iu)]
    return FeatureVector(C[iu], names, "covariance")


# -- local binary patterns --------------------------------------------------

def lbp_map(img: GrayImage) -> GrayImage:
    """4-neighbour LBP codes of the interior pixels.

    Bit 0 is the pixel above, then right, below, left; a bit is set when the
    neighbour is >= the center.
    """
    f = img.pixels
    H, W = f.shape
    if H < 3 or W < 3:
        raise ValueError("LBP needs an image of at least 3x3")
    c = f[1:-1, 1:-1]
    code = ((f[:-2, 1:-1] >= c).astype(np.int32)
            | (f[1:-1, 2:] >= c) << 1
            | (f[2:, 1:-1] >= c) << 2
            | (f[1:-1, :-2] >= c) << 3)
    return GrayImage(code, LBP_BINS)


def lgbp_features(stack: GaborStack) -> FeatureVector:
    vals, names = [], []
    for mn, ch in stack.items():
        codes = lbp_map(quantize(ch, STAT_LEVELS))
        vals.append(histogram(codes))
        names.extend(f"{_channel_tag(mn)}:lbp{b}" for b in range(LBP_BINS))
    return FeatureVector(np.concatenate(vals), names, "lgbp")
