"""
Quality metrics: PSNR, SSIM and the relative step change used as the
solver's stopping rule.
"""
import math

import numpy as np
from skimage.metrics import structural_similarity

from .exceptions import DimMismatch, TooSmall, ZeroGroundTruth
from .tensor_types import Tensor3

# PSNR of two identical inputs
PSNR_IDENTICAL = math.inf

# Standard SSIM parameters: 11x11 Gaussian window with sigma 1.5, K1 = 0.01, K2 = 0.03
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# Below this norm a tensor counts as zero for relative changes
ZERO_NORM = 1e-15


def _check_dims(a: Tensor3, b: Tensor3) -> None:
    if a.dims != b.dims:
        raise DimMismatch(f"Dimension mismatch: {a.dims} vs {b.dims}")


def psnr(ref: Tensor3, test: Tensor3, peak: float = None) -> float:
    """Peak signal-to-noise ratio in dB.

    ``peak`` defaults to max|ref| (use 255 for 8-bit images).  Identical
    inputs return PSNR_IDENTICAL.
    """
    _check_dims(ref, test)
    if peak is None:
        peak = float(np.max(np.abs(ref.data)))
    if peak <= 0:
        raise ValueError(f"PSNR peak must be positive, got {peak}")
    sq_err = float(np.sum((ref.data - test.data) ** 2))
    if sq_err == 0.0:
        return PSNR_IDENTICAL
    return 10.0 * math.log10(peak ** 2 * ref.size / sq_err)


def ssim(ref: np.ndarray, test: np.ndarray, dynamic_range: float) -> float:
    """Mean structural similarity of two image planes.

    2-D inputs are single planes; h x w x c inputs are scored per channel
    and averaged.
    """
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise DimMismatch(f"Dimension mismatch: {ref.shape} vs {test.shape}")
    if ref.ndim not in (2, 3):
        raise DimMismatch(f"SSIM needs an image plane or an h x w x c stack, got shape {ref.shape}")
    if min(ref.shape[:2]) < SSIM_WINDOW:
        raise TooSmall(f"SSIM needs planes of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {ref.shape[0]}x{ref.shape[1]}")
    return float(structural_similarity(
        ref,
        test,
        data_range=dynamic_range,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
        channel_axis=2 if ref.ndim == 3 else None,
    ))


def rmse_step(prev: Tensor3, curr: Tensor3) -> float:
    """||curr - prev||_F / ||curr||_F, or 0 when curr is the zero tensor"""
    _check_dims(prev, curr)
    denom = float(np.linalg.norm(curr.data.ravel()))
    if denom < ZERO_NORM:
        return 0.0
    return float(np.linalg.norm((curr.data - prev.data).ravel())) / denom


def relative_error(ref: Tensor3, test: Tensor3) -> float:
    """||test - ref||_F / ||ref||_F"""
    _check_dims(ref, test)
    denom = float(np.linalg.norm(ref.data.ravel()))
    if denom == 0.0:
        raise ZeroGroundTruth("Relative error is undefined for an all-zero reference")
    return float(np.linalg.norm((test.data - ref.data).ravel())) / denom
