"""
Laplace approximations for the absolute value and the nuclear norm.

The nonsmooth penalties are majorized by quadratics at the current mean
(|x| <= x^2 / (2|m|) + |m| / 2, and its spectral analogue), which gives
Gaussian posteriors with closed-form means, variances and expectations.
All functions accept scalars or numpy arrays and act elementwise.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .exceptions import BadPrecision, DimMismatch

ArrayLike = Union[float, np.ndarray]

DERIVATION = 'derivation'
ALGORITHM1 = 'algorithm1'
SIGMA_S_CONVENTIONS = (DERIVATION, ALGORITHM1)


@dataclass(frozen=True)
class ScalarPosterior:
    """Gaussian surrogate N(mean, variance); variance is 0 exactly where mean is 0"""
    mean: ArrayLike
    variance: ArrayLike


def _check_precision(alpha) -> None:
    if np.any(np.asarray(alpha) <= 0):
        raise BadPrecision(f"Precision alpha must be positive, got {alpha}")


def _check_weight(beta) -> None:
    if np.any(np.asarray(beta) < 0):
        raise BadPrecision(f"Penalty weight beta must be nonnegative, got {beta}")


def soft_threshold(b: ArrayLike, alpha: float, beta: float) -> ArrayLike:
    """argmin_x (alpha/2)(x - b)^2 + beta|x| = sign(b) * max(|b| - beta/alpha, 0)"""
    _check_precision(alpha)
    _check_weight(beta)
    b = np.asarray(b, dtype=np.float64)
    out = np.sign(b) * np.maximum(np.abs(b) - beta / alpha, 0.0)
    return out if out.ndim else float(out)


def abs_posterior(b: ArrayLike, alpha: float, beta: float, convention: str = DERIVATION) -> ScalarPosterior:
    """Posterior of x under precision-alpha Gaussian likelihood and Laplace prior beta|x|.

    The mean is the soft threshold of b.  With the 'derivation' convention the
    variance is |m| / (alpha|m| + beta), the inverse of the majorized precision
    alpha + beta/|m|; 'algorithm1' uses alpha|m| / (alpha|m| + beta).
    """
    if convention not in SIGMA_S_CONVENTIONS:
        raise ValueError(f"Unknown sigma-s convention '{convention}'")
    mean = np.asarray(soft_threshold(b, alpha, beta), dtype=np.float64)
    abs_mean = np.abs(mean)
    numerator = abs_mean if convention == DERIVATION else alpha * abs_mean
    denominator = alpha * abs_mean + beta
    variance = np.divide(numerator, denominator, out=np.zeros_like(abs_mean), where=abs_mean != 0)
    if mean.ndim == 0:
        return ScalarPosterior(float(mean), float(variance))
    return ScalarPosterior(mean, variance)


def expected_abs(p: ScalarPosterior, alpha: float, beta: float) -> ArrayLike:
    """E|x| ~= |m| + 1 / (2(alpha|m| + beta)); at m = 0 this is 1/(2 beta)"""
    _check_precision(alpha)
    _check_weight(beta)
    abs_mean = np.abs(np.asarray(p.mean, dtype=np.float64))
    if np.any((np.asarray(beta) == 0) & (abs_mean == 0)):
        raise BadPrecision("E|x| at a zero mean needs a positive penalty weight beta")
    out = abs_mean + 1.0 / (2.0 * (alpha * abs_mean + beta))
    return out if out.ndim else float(out)


def nuclear_posterior_trace_terms(
    svals_col: np.ndarray, alpha: float, beta: float, w_col: np.ndarray
) -> Tuple[float, float]:
    """Trace summaries of the Gaussian surrogate for one Fourier slice.

    Args:
        svals_col: post-shrinkage singular values d_i of the slice
        alpha: likelihood precision
        beta: nuclear norm weight
        w_col: per-singular-value weights (all ones for the plain norm)

    Returns:
        (cov_trace, inv_prec_trace): sum d_i/(alpha d_i + beta w_i) and
        sum 1/(alpha d_i + beta w_i), both over the nonzero d_i only.
    """
    d = np.asarray(svals_col, dtype=np.float64)
    w = np.asarray(w_col, dtype=np.float64)
    if d.shape != w.shape:
        raise DimMismatch(f"svals and weights differ in length: {d.shape} vs {w.shape}")
    _check_weight(beta)
    d, w = d[d != 0], w[d != 0]
    if d.size == 0:
        return 0.0, 0.0
    denom = alpha * d + beta * w
    return float(np.sum(d / denom)), float(np.sum(1.0 / denom))
