"""Self-similar Gabor dictionary and magnitude convolution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import fft as sfft

from .imaging import GrayImage, RealImage

MAX_SUPPORT = 4097
SIGMA_V_FORMS = ("printed", "classic")

# Scale x orientation grids of the benchmark sweep.
PAPER_GRIDS = ((2, 6), (3, 4), (3, 5), (4, 4), (4, 6), (5, 5), (6, 3), (6, 6))


@dataclass(frozen=True)
class BankConfig:
    """Dictionary shape and frequency range.

    Parameters
    ----------
    scales, orientations : int
        ``M`` and ``N``.
    u_low, u_high : float
        Lowest and highest center frequency, cycles per pixel.
    truncation : float
        Kernel half-width in units of the largest spatial sigma.
    sigma_v_form : {"printed", "classic"}
        Which closed form to use for the angular bandwidth; see
        :func:`derive_params`.
    """

    scales: int = 4
    orientations: int = 6
    u_low: float = 0.05
    u_high: float = 0.4
    truncation: float = 3.0
    sigma_v_form: str = "printed"

    def __post_init__(self):
        if self.scales < 2:
            raise ValueError("scales must be >= 2 (scale ratio undefined for one scale)")
        if self.orientations < 1:
            raise ValueError("orientations must be >= 1")
        if not 0 < self.u_low < self.u_high < 0.5:
            raise ValueError("need 0 < u_low < u_high < 0.5")
        if self.truncation <= 0:
            raise ValueError("truncation must be positive")
        if self.sigma_v_form not in SIGMA_V_FORMS:
            raise ValueError(f"sigma_v_form must be one of {SIGMA_V_FORMS}")

    @property
    def n_channels(self) -> int:
        return self.scales * self.orientations

    @property
    def grid_label(self) -> str:
        return f"{self.scales}x{self.orientations}"

    def channels(self) -> Iterator[tuple[int, int]]:
        """(m, n) pairs in scan order: scale outer, orientation inner."""
        for m in range(self.scales):
            for n in range(self.orientations):
                yield m, n


def parse_grid(text: str) -> tuple[int, int]:
    """``"4x6"`` -> ``(4, 6)``."""
    try:
        m, n = text.lower().split("x")
        return int(m), int(n)
    except ValueError:
        raise ValueError(f"grid must look like '4x6', got {text!r}") from None


@dataclass(frozen=True)
class BankParams:
    a: float
    sigma_u: float
    sigma_v: float
    sigma_x: float
    sigma_y: float
    W: float


def derive_params(config: BankConfig) -> BankParams:
    """Scale ratio and filter widths that tile the frequency plane.

    ``a = (U_h / U_l) ** (1 / (M - 1))`` and
    ``sigma_u = (a - 1) U_h / ((a + 1) sqrt(2 ln 2))``. The angular width
    ``sigma_v`` has two forms::

        printed: tan(pi/2N) [U_h - 2 ln(sigma_u^2 / U_h)] / sqrt(2 ln 2 - (2 ln 2)^2 sigma_u^2 / U_h^2)
        classic: tan(pi/2N) [U_h - 2 ln 2 * sigma_u^2 / U_h] / sqrt(same)

    Spatial widths follow from the Fourier pair: ``sigma_x = 1 / (2 pi sigma_u)``.
    """
    M, N = config.scales, config.orientations
    uh, ul = config.u_high, config.u_low
    a = (uh / ul) ** (1.0 / (M - 1))
    ln2 = math.log(2.0)
    sigma_u = (a - 1.0) * uh / ((a + 1.0) * math.sqrt(2.0 * ln2))
    denom = math.sqrt(2.0 * ln2 - (2.0 * ln2) ** 2 * sigma_u ** 2 / uh ** 2)
    if config.sigma_v_form == "printed":
        num = uh - 2.0 * math.log(sigma_u ** 2 / uh)
    else:
        num = uh - 2.0 * ln2 * sigma_u ** 2 / uh
    sigma_v = math.tan(math.pi / (2 * N)) * num / denom
    return BankParams(
        a=a,
        sigma_u=sigma_u,
        sigma_v=sigma_v,
        sigma_x=1.0 / (2.0 * math.pi * sigma_u),
        sigma_y=1.0 / (2.0 * math.pi * sigma_v),
        W=uh,
    )


def mother_gabor(x, y, sigma_x: float, sigma_y: float, W: float):
    """Complex Gabor function: Gaussian envelope times ``exp(2 pi j W x)``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    norm = 1.0 / (2.0 * math.pi * sigma_x * sigma_y)
    envelope = -0.5 * (x ** 2 / sigma_x ** 2 + y ** 2 / sigma_y ** 2)
    return norm * np.exp(envelope + 2j * math.pi * W * x)


@dataclass(frozen=True)
class GaborKernel:
    m: int
    n: int
    theta: float
    taps: np.ndarray  # complex, square, odd side, center at [h, h]

    @property
    def half_width(self) -> int:
        return self.taps.shape[0] // 2


def kernel_half_width(config: BankConfig, params: BankParams, m: int) -> int:
    return math.ceil(config.truncation * params.a ** m * max(params.sigma_x, params.sigma_y))


def make_kernel(config: BankConfig, params: BankParams, m: int, n: int) -> GaborKernel:
    h = kernel_half_width(config, params, m)
    side = 2 * h + 1
    if side > MAX_SUPPORT:
        raise ValueError(f"kernel ({m},{n}) needs {side} taps per side (limit {MAX_SUPPORT})")
    theta = math.pi * n / config.orientations
    # taps[row, col] holds the lattice point (x=col-h, y=row-h)
    y, x = np.mgrid[-h:h + 1, -h:h + 1].astype(np.float64)
    scale = params.a ** (-m)
    c, s = math.cos(theta), math.sin(theta)
    xr = scale * (x * c + y * s)
    yr = scale * (-x * s + y * c)
    taps = scale * mother_gabor(xr, yr, params.sigma_x, params.sigma_y, params.W)
    taps.setflags(write=False)
    return GaborKernel(m, n, theta, taps)


def build_bank(config: BankConfig) -> list[GaborKernel]:
    """All ``M * N`` kernels in (m, n) scan order."""
    params = derive_params(config)
    return [make_kernel(config, params, m, n) for m, n in config.channels()]


def _as_array(img) -> np.ndarray:
    if isinstance(img, GrayImage):
        return img.pixels.astype(np.float64)
    return np.asarray(img, dtype=np.float64)


class _SpectrumCache:
    """Image FFT on a padded grid, reused across kernels that fit in it."""

    def __init__(self, image: np.ndarray, max_half_width: int):
        self.shape = image.shape
        H, W = image.shape
        self.pad = (sfft.next_fast_len(H + 2 * max_half_width),
                    sfft.next_fast_len(W + 2 * max_half_width))
        self.spectrum = sfft.fft2(image, s=self.pad)

    def magnitude(self, kernel: GaborKernel) -> np.ndarray:
        h = kernel.half_width
        H, W = self.shape
        full = sfft.ifft2(self.spectrum * sfft.fft2(kernel.taps, s=self.pad))
        return np.abs(full[h:h + H, h:h + W])


def convolve_magnitude(img, kernel: GaborKernel) -> RealImage:
    """``|img * kernel|`` with zero padding, same size as ``img``.

    Computed as a product of 2-D FFTs on a grid large enough that the
    circular wrap never reaches the cropped output.
    """
    arr = _as_array(img)
    return _SpectrumCache(arr, kernel.half_width).magnitude(kernel)


@dataclass(frozen=True)
class GaborStack:
    """Magnitude images, ``channels[m, n]`` of shape ``(H, W)``."""

    channels: np.ndarray  # (M, N, H, W)

    @property
    def scales(self) -> int:
        return self.channels.shape[0]

    @property
    def orientations(self) -> int:
        return self.channels.shape[1]

    @property
    def image_shape(self) -> tuple[int, int]:
        return self.channels.shape[2:]

    def __len__(self):
        return self.scales * self.orientations

    def __getitem__(self, mn):
        return self.channels[mn]

    def flat(self) -> np.ndarray:
        """Channels as ``(M * N, H, W)`` in scan order."""
        return self.channels.reshape(-1, *self.image_shape)

    def items(self):
        for m in range(self.scales):
            for n in range(self.orientations):
                yield (m, n), self.channels[m, n]


def gabor_stack(img, config: BankConfig, bank: list[GaborKernel] | None = None) -> GaborStack:
    """Convolve ``img`` with every kernel of the dictionary."""
    if bank is None:
        bank = build_bank(config)
    arr = _as_array(img)
    cache = _SpectrumCache(arr, max(k.half_width for k in bank))
    out = np.empty((config.scales, config.orientations) + arr.shape, dtype=np.float64)
    for k in bank:
        out[k.m, k.n] = cache.magnitude(k)
    return GaborStack(out)


def bank_manifest(config: BankConfig) -> str:
    """Human-readable key=value summary of a bank and its derived widths."""
    p = derive_params(config)
    lines = [
        f"scales={config.scales}",
        f"orientations={config.orientations}",
        f"u_low={config.u_low!r}",
        f"u_high={config.u_high!r}",
        f"truncation={config.truncation!r}",
        f"sigma_v_form={config.sigma_v_form}",
        f"a={p.a!r}",
        f"sigma_u={p.sigma_u!r}",
        f"sigma_v={p.sigma_v!r}",
        f"sigma_x={p.sigma_x!r}",
        f"sigma_y={p.sigma_y!r}",
        f"W={p.W!r}",
    ]
    for m in range(config.scales):
        lines.append(f"support[{m}]={2 * kernel_half_width(config, p, m) + 1}")
    return "\n".join(lines) + "\n"
