"""
t-SVD, tubal rank, (weighted) tensor nuclear norm and the tensor singular
value thresholding proximal operators.

Every Fourier slice is factored independently; only the first n3//2 + 1
slices go through an SVD and the rest are mirrored by conjugation.
"""
from dataclasses import dataclass
import logging

import numpy as np

from .exceptions import BadTruncation, DimMismatch, NonMonotoneWeights, NumericalFailure
from .tensor_algebra import from_fourier_half, half_slices, mirror_half
from .tensor_types import CTensor3, Tensor3

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TSvdFactors:
    """Fourier-domain factors of a (skinny) t-SVD.

    u_hat: n1 x r x n3, svals: r x n3 (column k holds the nonincreasing
    singular values of Fourier slice k), v_hat: n2 x r x n3.
    """
    u_hat: CTensor3
    svals: np.ndarray
    v_hat: CTensor3

    @property
    def r(self) -> int:
        return self.svals.shape[0]

    @property
    def n3(self) -> int:
        return self.svals.shape[1]

    def reconstruct(self) -> Tensor3:
        """Real tensor U * D * V^H assembled slice by slice"""
        n1 = self.u_hat.dims[0]
        n2 = self.v_hat.dims[0]
        if self.r == 0:
            return Tensor3.zeros(n1, n2, self.n3)
        h = half_slices(self.n3)
        u = self.u_hat.data[:, :, :h]
        v = self.v_hat.data[:, :, :h]
        half = np.einsum('irk,rk,jrk->ijk', u, self.svals[:, :h], np.conj(v))
        return from_fourier_half(half, self.n3)


def _empty_factor(n: int, n3: int) -> CTensor3:
    return CTensor3(np.zeros((n, 0, n3), dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Nonnegative min(n1, n2) x n3 weights of the weighted tensor nuclear norm"""
    w: np.ndarray

    def __post_init__(self):
        arr = np.array(self.w, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise DimMismatch(f"WeightMatrix must be 2-D, got shape {arr.shape}")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("WeightMatrix entries must be finite and nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, 'w', arr)

    @classmethod
    def ones(cls, m: int, n3: int) -> 'WeightMatrix':
        return cls(np.ones((m, n3)))

    @property
    def shape(self):
        return self.w.shape

    def is_monotone(self) -> bool:
        """True when every column is nondecreasing from top to bottom"""
        return bool(np.all(np.diff(self.w, axis=0) >= 0))


def _fourier_svd(a: Tensor3):
    """SVDs of the first half_slices(n3) Fourier slices, stacked on the last axis"""
    n3 = a.dims[2]
    h = half_slices(n3)
    a_hat = np.fft.fft(a.data, axis=2)[:, :, :h]
    try:
        u, s, vh = np.linalg.svd(a_hat.transpose(2, 0, 1), full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Fourier slice SVD did not converge: {exc}") from exc
    # (h, n1, m), (h, m), (h, m, n2) -> slice index last
    return u.transpose(1, 2, 0), s.T, np.conj(vh).transpose(2, 1, 0)


def t_svd(a: Tensor3) -> TSvdFactors:
    """Skinny t-SVD with r = min(n1, n2)"""
    n3 = a.dims[2]
    u, s, v = _fourier_svd(a)
    return TSvdFactors(
        u_hat=CTensor3(mirror_half(u, n3)),
        svals=_mirror_real(s, n3),
        v_hat=CTensor3(mirror_half(v, n3)),
    )


def _mirror_real(svals_half: np.ndarray, n3: int) -> np.ndarray:
    h = half_slices(n3)
    full = np.empty((svals_half.shape[0], n3))
    full[:, :h] = svals_half
    if n3 > h:
        full[:, h:] = svals_half[:, 1:n3 - h + 1][:, ::-1]
    return full


def tubal_rank(a: Tensor3, tol: float = 1e-6) -> int:
    """Number of singular tubes whose largest entry exceeds tol * svals[0, 0]"""
    if tol < 0:
        raise ValueError("tubal_rank tolerance must be nonnegative")
    svals = t_svd(a).svals
    return int(np.count_nonzero(np.max(svals, axis=1) > tol * svals[0, 0]))


def tnn(a: Tensor3) -> float:
    """Tensor nuclear norm: (1/n3) * sum of all Fourier-slice singular values"""
    svals = t_svd(a).svals
    return float(np.sum(svals) / a.dims[2])


def weighted_tnn(a: Tensor3, w: WeightMatrix) -> float:
    n1, n2, n3 = a.dims
    _check_weight_dims(w, n1, n2, n3)
    svals = t_svd(a).svals
    return weighted_sval_sum(svals, w.w) / n3


def weighted_sval_sum(svals: np.ndarray, w: np.ndarray) -> float:
    """sum_jk W_jk * sigma_jk over the rows present in ``svals``"""
    return float(np.sum(w[:svals.shape[0], :] * svals))


def pstnn_weights(n1: int, n2: int, n3: int, k_trunc: int) -> WeightMatrix:
    """Partial-sum TNN weights: the k_trunc largest values per slice are left unpenalized"""
    m = min(n1, n2)
    if not 0 <= k_trunc <= m:
        raise BadTruncation(f"k_trunc must lie in [0, {m}], got {k_trunc}")
    w = np.ones((m, n3))
    w[:k_trunc, :] = 0.0
    return WeightMatrix(w)


def _check_weight_dims(w: WeightMatrix, n1: int, n2: int, n3: int) -> None:
    expected = (min(n1, n2), n3)
    if w.shape != expected:
        raise DimMismatch(f"WeightMatrix must be {expected[0]}x{expected[1]}, got {w.shape[0]}x{w.shape[1]}")


def _shrink(a: Tensor3, thresholds: np.ndarray):
    """Shrink each Fourier singular value sigma_jk by thresholds[j, k]"""
    n3 = a.dims[2]
    h = half_slices(n3)
    u, s, v = _fourier_svd(a)
    shrunk = np.maximum(s - thresholds[:, :h], 0.0)

    # rows with a nonzero value in some slice span the retained subspace
    keep = np.any(shrunk > 0, axis=1)
    u, shrunk, v = u[:, keep, :], shrunk[keep, :], v[:, keep, :]
    logger.debug(f"Shrinkage kept {int(np.count_nonzero(keep))} of {keep.size} singular tubes")

    if not np.any(keep):
        n1, n2, _ = a.dims
        factors = TSvdFactors(_empty_factor(n1, n3), np.zeros((0, n3)), _empty_factor(n2, n3))
        return Tensor3.zeros(n1, n2, n3), factors

    factors = TSvdFactors(
        u_hat=CTensor3(mirror_half(u, n3)),
        svals=_mirror_real(shrunk, n3),
        v_hat=CTensor3(mirror_half(v, n3)),
    )
    half = np.einsum('irk,rk,jrk->ijk', u, shrunk, np.conj(v))
    return from_fourier_half(half, n3), factors


def t_svt(a: Tensor3, tau: float):
    """Proximal operator of tau * TNN.

    Returns:
        (l, factors): the thresholded tensor and its post-shrinkage factors,
        truncated to the singular tubes that survived.
    """
    if tau < 0:
        raise ValueError(f"t_svt threshold must be nonnegative, got {tau}")
    n1, n2, n3 = a.dims
    return _shrink(a, tau * np.ones((min(n1, n2), n3)))


def weighted_t_svt(a: Tensor3, tau: float, w: WeightMatrix):
    """Proximal operator of tau * weighted TNN (per-value threshold tau * W_jk).

    Raises:
        NonMonotoneWeights: some weight column decreases.
    """
    if tau < 0:
        raise ValueError(f"weighted_t_svt threshold must be nonnegative, got {tau}")
    n1, n2, n3 = a.dims
    _check_weight_dims(w, n1, n2, n3)
    if not w.is_monotone():
        raise NonMonotoneWeights("Weight columns must be nondecreasing for closed-form shrinkage")
    return _shrink(a, tau * w.w)
