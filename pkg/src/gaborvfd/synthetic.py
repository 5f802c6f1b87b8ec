"""Synthetic texture corpora for smoke tests and desk-scale benchmarks."""

from __future__ import annotations

import numpy as np

from .imaging import GrayImage, LabeledDataset, extract_windows, quantize


def sinusoid_patch(size: int, freq: float, theta: float, phase: float = 0.0) -> np.ndarray:
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    return np.sin(2 * np.pi * freq * (x * np.cos(theta) + y * np.sin(theta)) + phase)


def sinusoid_dataset(n_classes: int = 4, per_class: int = 40, size: int = 32, seed: int = 0,
                     noise: float = 0.1, theta: float | None = 0.0) -> LabeledDataset:
    """One sinusoid frequency per class with a random phase per sample.

    ``theta`` fixes the carrier orientation; ``None`` draws it per sample.
    """
    rng = np.random.default_rng(seed)
    freqs = np.geomspace(0.04, 0.35, n_classes)
    images, labels = [], []
    for c, f in enumerate(freqs):
        for _ in range(per_class):
            angle = rng.uniform(0, np.pi) if theta is None else theta
            patch = sinusoid_patch(size, f, angle, rng.uniform(0, 2 * np.pi))
            patch += noise * rng.standard_normal(patch.shape)
            images.append(quantize(patch, 256))
            labels.append(c)
    return LabeledDataset(images, np.array(labels), [f"sin{c:02d}" for c in range(n_classes)])


def power_law_noise(size: int, beta: float, rng) -> np.ndarray:
    """Gaussian random field with isotropic spectrum ``|k|^-beta``."""
    ky = np.fft.fftfreq(size)[:, None]
    kx = np.fft.rfftfreq(size)[None, :]
    k = np.hypot(kx, ky)
    k[0, 0] = np.inf
    amp = k ** (-beta / 2.0)
    spec = amp * (rng.standard_normal(amp.shape) + 1j * rng.standard_normal(amp.shape))
    field = np.fft.irfft2(spec, s=(size, size))
    return field / field.std()


def texture_image(size: int, freq: float, theta: float, beta: float, mix: float, rng) -> np.ndarray:
    """Oriented sinusoid blended with power-law noise; ``mix`` weights the noise."""
    wave = sinusoid_patch(size, freq, theta, rng.uniform(0, 2 * np.pi))
    return (1 - mix) * wave + mix * power_law_noise(size, beta, rng)


def brodatz_style_dataset(n_classes: int = 10, windows: int = 10, win: int = 64, source: int = 320,
                          seed: int = 0) -> LabeledDataset:
    """Cut non-overlapping windows out of one large synthetic texture per class.

    Class textures differ in carrier frequency, orientation, noise roughness and
    the sinusoid/noise balance; neighbouring classes overlap in some of these.
    """
    rng = np.random.default_rng(seed)
    images, labels, names = [], [], []
    for c in range(n_classes):
        freq = rng.uniform(0.05, 0.3)
        theta = rng.uniform(0, np.pi)
        beta = rng.uniform(1.5, 3.5)
        mix = rng.uniform(0.3, 0.8)
        big = quantize(texture_image(source, freq, theta, beta, mix, rng), 256)
        for i, w in enumerate(extract_windows(big, windows, win, win, seed=seed * 1000 + c)):
            images.append(w)
            labels.append(c)
            names.append(f"tex{c:02d}/w{i:02d}")
    return LabeledDataset(images, np.array(labels), [f"tex{c:02d}" for c in range(n_classes)], names)


def stripes(size: int, period: int, vertical: bool) -> GrayImage:
    """Binary square-wave stripes; vertical stripes vary along x."""
    y, x = np.mgrid[0:size, 0:size]
    t = x if vertical else y
    return GrayImage(((t // (period // 2)) % 2) * 255, 256)
