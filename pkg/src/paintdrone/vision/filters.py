"""Edge stimulation: same-size Mexican-hat filtering or a Gabor bank reduced by PCA."""
from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np
from scipy import ndimage
from skimage.filters import gabor_kernel

from .pgm import check_gray

DEFAULT_ORIENTATIONS = 4
DEFAULT_WAVELENGTHS = (4.0, 8.0)


class DegenerateImageWarning(UserWarning):
    pass


def ricker_kernel(scale: float) -> np.ndarray:
    """2-D Mexican hat (1 - r^2/2s^2) exp(-r^2/2s^2) on a (2R+1)^2 grid, R = ceil(4s).

    The truncated kernel is shifted to an exact zero mean so flat regions
    give no response.
    """
    if not scale >= 1:
        raise ValueError(f"scale must be >= 1 pixel, got {scale}")
    radius = int(math.ceil(4.0 * scale))
    y, x = np.mgrid[-radius:radius + 1, -radius:radius + 1].astype(float)
    r2 = (x * x + y * y) / (2.0 * scale * scale)
    k = (1.0 - r2) * np.exp(-r2)
    k -= k.mean()
    return k / np.abs(k).sum()


def _convolve_same(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    kh, kw = kernel.shape
    if kh > img.shape[0] or kw > img.shape[1]:
        raise ValueError(f"kernel {kh}x{kw} is larger than the {img.shape[0]}x{img.shape[1]} image")
    # 'reflect' in scipy repeats the edge pixel (symmetric padding).
    return ndimage.convolve(img, kernel, mode="reflect")


def mexican_hat_filter(img: np.ndarray, scale: float = 2.0) -> np.ndarray:
    return _convolve_same(check_gray(img), ricker_kernel(scale))


def gabor_bank(orientations: int = DEFAULT_ORIENTATIONS,
               wavelengths: Sequence[float] = DEFAULT_WAVELENGTHS) -> list[np.ndarray]:
    if orientations < 1 or not wavelengths:
        raise ValueError("Gabor bank needs at least one orientation and one wavelength")
    bank = []
    for lam in wavelengths:
        for i in range(orientations):
            k = gabor_kernel(1.0 / lam, theta=math.pi * i / orientations)
            # Zero-mean real part so flat regions do not respond.
            bank.append(k - k.real.mean())
    return bank


def gabor_pca_filter(img: np.ndarray, orientations: int = DEFAULT_ORIENTATIONS,
                     wavelengths: Sequence[float] = DEFAULT_WAVELENGTHS) -> np.ndarray:
    """First principal component of per-pixel Gabor magnitudes, rescaled to [-1, 1]."""
    img = check_gray(img)
    bank = gabor_bank(orientations, wavelengths)
    feats = np.stack([
        np.hypot(_convolve_same(img, k.real), _convolve_same(img, k.imag)) for k in bank
    ], axis=-1).reshape(-1, len(bank))
    centred = feats - feats.mean(axis=0)
    cov = centred.T @ centred / max(1, centred.shape[0] - 1)
    if np.trace(cov) <= 1e-12:
        warnings.warn("image has no texture variance; Gabor/PCA response is zero",
                      DegenerateImageWarning, stacklevel=2)
        return np.zeros_like(img)
    _, vecs = np.linalg.eigh(cov)
    pc = vecs[:, -1]
    # Eigenvector sign is arbitrary; fix it so the largest loading is positive.
    if pc[np.argmax(np.abs(pc))] < 0:
        pc = -pc
    # Raw magnitudes are projected (not the centred ones) so flat regions,
    # where every zero-mean kernel gives 0, stay at 0.
    proj = (feats @ pc).reshape(img.shape)
    peak = np.abs(proj).max()
    return proj / peak if peak > 0 else proj


FILTERS = {
    "mexican-hat": mexican_hat_filter,
    "gabor-pca": gabor_pca_filter,
}
