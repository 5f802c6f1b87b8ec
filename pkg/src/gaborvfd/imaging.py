"""Gray-level image handling: decoding, quantization, window sampling, datasets."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

IMAGE_SUFFIXES = (".png", ".pgm")
MAX_WINDOW_REJECTIONS = 10_000


class ImageReadError(ValueError):
    """A file exists but could not be decoded as an image."""


class UnsupportedFormatError(ValueError):
    """The decoded image is not in a format this package accepts."""


class WindowPlacementError(RuntimeError):
    """Non-overlapping windows could not be placed within the rejection budget."""


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class GrayImage:
    """Quantized intensity grid.

    Parameters
    ----------
    pixels : ndarray, shape (height, width)
        Integer intensities in ``[0, levels - 1]``. Row-major, row 0 on top.
    levels : int
        Number of gray levels ``G``.
    """

    pixels: np.ndarray
    levels: int = 256

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"pixels must be a non-empty 2-D array, got shape {px.shape}")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if not np.issubdtype(px.dtype, np.integer):
            if not np.all(np.equal(np.mod(px, 1), 0)):
                raise ValueError("pixels must be integers")
        px = px.astype(np.int32)
        if px.min() < 0 or px.max() >= self.levels:
            raise ValueError(f"intensities must lie in [0, {self.levels - 1}]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def crop(self, x: int, y: int, w: int, h: int) -> GrayImage:
        return GrayImage(self.pixels[y:y + h, x:x + w], self.levels)


# Real-valued images (convolution outputs) are plain float64 arrays of shape (H, W).
RealImage = np.ndarray


@dataclass
class LabeledDataset:
    """Images with class labels.

    ``labels[i]`` is an index into ``class_names``; ``names[i]`` identifies the
    sample (relative path when loaded from disk).
    """

    images: list[GrayImage]
    labels: np.ndarray
    class_names: list[str]
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.images) != len(self.labels):
            raise DatasetError("images and labels differ in length")
        if not self.names:
            self.names = [f"sample{i:05d}" for i in range(len(self.images))]
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise DatasetError("label outside class_names")
        counts = np.bincount(self.labels, minlength=len(self.class_names))
        empty = [c for c, n in zip(self.class_names, counts) if n == 0]
        if empty:
            raise DatasetError(f"class {empty[0]!r} has no samples")

    def __len__(self):
        return len(self.images)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, index: Sequence[int]) -> LabeledDataset:
        index = list(index)
        return LabeledDataset(
            [self.images[i] for i in index],
            self.labels[index],
            list(self.class_names),
            [self.names[i] for i in index],
        )


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Integer ITU-R 601 luma, rounded half-up: ``(299 R + 587 G + 114 B + 500) // 1000``."""
    rgb = rgb.astype(np.int64)
    return (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000


def load_image(path) -> GrayImage:
    """Read an 8-bit PNG or binary PGM as a 256-level :class:`GrayImage`.

    Color inputs are reduced with :func:`luminance`; alpha is ignored.

    Raises
    ------
    FileNotFoundError
        ``path`` does not exist.
    ImageReadError
        The file cannot be decoded.
    UnsupportedFormatError
        Decoded, but not PNG/PGM or not 8 bits per channel.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"file not found: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            fmt, mode = im.format, im.mode
            if fmt not in ("PNG", "PPM"):
                raise UnsupportedFormatError(f"unsupported format {fmt} in {path}")
            if mode in ("L", "P", "LA", "1"):
                gray = np.asarray(im.convert("L"))
            elif mode in ("RGB", "RGBA"):
                gray = luminance(np.asarray(im.convert("RGB")))
            else:
                raise UnsupportedFormatError(f"unsupported pixel mode {mode} in {path}")
    except UnidentifiedImageError as exc:
        raise ImageReadError(f"cannot decode image {path}") from exc
    except OSError as exc:
        raise ImageReadError(f"cannot read image {path}: {exc}") from exc
    return GrayImage(gray, 256)


def save_pgm(img: GrayImage, path) -> None:
    """Write a binary (P5) 8-bit PGM. Images with more than 256 levels are rejected."""
    if img.levels > 256:
        raise ValueError("PGM output supports at most 256 levels")
    path = Path(path)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    path.write_bytes(header + img.pixels.astype(np.uint8).tobytes())


def quantize(values: RealImage, levels: int) -> GrayImage:
    """Linear min-max rescale of a real image to ``levels`` gray levels.

    ``q = floor((v - min) * (levels - 1) / (max - min) + 0.5)``; a constant
    image maps to all zeros.
    """
    if levels < 2:
        raise ValueError("levels must be >= 2")
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 1:
        v = v[np.newaxis, :]
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot quantize non-finite values")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return GrayImage(np.zeros(v.shape, dtype=np.int32), levels)
    q = np.floor((v - lo) * ((levels - 1) / (hi - lo)) + 0.5)
    return GrayImage(np.clip(q, 0, levels - 1).astype(np.int32), levels)


def _overlaps(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def window_rects(width: int, height: int, count: int, win_w: int, win_h: int,
                 seed: int) -> list[tuple[int, int, int, int]]:
    """Place ``count`` pairwise-disjoint ``(x, y, w, h)`` rectangles at random.

    Candidates are drawn uniformly over valid top-left corners from
    ``numpy.random.default_rng(seed)`` and rejected when they intersect an
    already accepted rectangle.
    """
    if win_w < 1 or win_h < 1 or count < 0:
        raise ValueError("window size must be positive and count non-negative")
    if win_w > width or win_h > height:
        raise WindowPlacementError("cannot place non-overlapping windows: window larger than image")
    rng = np.random.default_rng(seed)
    rects: list[tuple[int, int, int, int]] = []
    rejections = 0
    while len(rects) < count:
        x = int(rng.integers(0, width - win_w + 1))
        y = int(rng.integers(0, height - win_h + 1))
        cand = (x, y, win_w, win_h)
        if any(_overlaps(cand, r) for r in rects):
            rejections += 1
            if rejections > MAX_WINDOW_REJECTIONS:
                raise WindowPlacementError("cannot place non-overlapping windows")
            continue
        rects.append(cand)
    return rects


def extract_windows(img: GrayImage, count: int, win_w: int, win_h: int,
                    seed: int) -> list[GrayImage]:
    """Cut ``count`` non-overlapping random windows out of ``img``."""
    rects = window_rects(img.width, img.height, count, win_w, win_h, seed)
    return [img.crop(*r) for r in rects]


def list_images(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir()
                  if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def load_dataset(root) -> LabeledDataset:
    """Load a ``root/<class>/<image>.{png,pgm}`` tree.

    Classes are the sorted subdirectory names, samples are read in sorted
    filename order.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root not found: {root}")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetError(f"dataset root {root} contains no class directories")
    images, labels, names = [], [], []
    for label, cdir in enumerate(class_dirs):
        files = list_images(cdir)
        if not files:
            raise DatasetError(f"class {cdir.name!r} has no readable images")
        for f in files:
            try:
                images.append(load_image(f))
            except (ImageReadError, UnsupportedFormatError) as exc:
                raise DatasetError(f"bad image file {f}: {exc}") from exc
            labels.append(label)
            names.append(f"{cdir.name}/{f.name}")
    return LabeledDataset(images, np.array(labels), [d.name for d in class_dirs], names)


def save_dataset(ds: LabeledDataset, root) -> list[Path]:
    """Write a dataset as a class-per-directory tree of PGM files."""
    root = Path(root)
    written = []
    for img, label, name in zip(ds.images, ds.labels, ds.names):
        cdir = root / ds.class_names[label]
        cdir.mkdir(parents=True, exist_ok=True)
        out = cdir / (Path(name).stem + ".pgm")
        save_pgm(img, out)
        written.append(out)
    return written
