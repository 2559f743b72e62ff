from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DimMismatch, SymmetryViolation

# Absolute slack per unit of the largest Fourier entry and per tube length
FFT_ROUNDOFF = 64 * np.finfo(np.float64).eps


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, order='F', copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Tensor3:
    """Dense real third-order tensor (n1 x n2 x n3), immutable.

    Entries are stored column-major per frontal slice with slices contiguous,
    i.e. index i varies fastest, then j, then k.
    """
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or 0 in arr.shape:
            raise DimMismatch(f"Tensor3 needs three positive dimensions, got shape {arr.shape}")
        if np.iscomplexobj(arr):
            raise TypeError("Tensor3 holds real values; use CTensor3 for Fourier images")
        arr = _frozen_array(arr, np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("Tensor3 entries must be finite")
        object.__setattr__(self, 'data', arr)

    @classmethod
    def zeros(cls, n1: int, n2: int, n3: int) -> 'Tensor3':
        return cls(np.zeros((n1, n2, n3)))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def frontal(self, k: int) -> np.ndarray:
        """Frontal slice k (0-based) as a read-only matrix view"""
        return self.data[:, :, k]

    def __add__(self, other: 'Tensor3') -> 'Tensor3':
        _check_same_dims(self, other)
        return Tensor3(self.data + other.data)

    def __sub__(self, other: 'Tensor3') -> 'Tensor3':
        _check_same_dims(self, other)
        return Tensor3(self.data - other.data)

    def scaled(self, factor: float) -> 'Tensor3':
        return Tensor3(self.data * factor)

    def __repr__(self):
        n1, n2, n3 = self.dims
        return f"Tensor3({n1}x{n2}x{n3})"


@dataclass(frozen=True, eq=False)
class CTensor3:
    """Complex third-order tensor holding mode-3 DFT images.

    The middle axis may be empty, which is how rank-0 t-SVD factor stacks
    (n x 0 x n3) are stored.
    """
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.shape[0] == 0 or arr.shape[2] == 0:
            raise DimMismatch(f"CTensor3 needs positive outer dimensions, got shape {arr.shape}")
        object.__setattr__(self, 'data', _frozen_array(arr, np.complex128))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.data.shape

    def hermitian_defect(self) -> float:
        """Largest deviation from the conjugate symmetry of a real tensor's DFT.

        Slice k must equal the conjugate of slice n3-k (0-based), which also
        forces slice 0 (and slice n3/2 for even n3) to be real. Each pair is
        measured relative to its own magnitude, so a large slice elsewhere
        cannot hide an asymmetric pair. Deviations within FFT roundoff of the
        largest entry count as zero.
        """
        n3 = self.dims[2]
        if self.data.size == 0:
            return 0.0
        partner = (-np.arange(n3)) % n3
        mirror = np.conj(self.data[:, :, partner])
        defect = np.max(np.abs(self.data - mirror), axis=(0, 1))
        magnitude = np.max(np.abs(self.data), axis=(0, 1))
        floor = FFT_ROUNDOFF * max(n3, 2) * float(np.max(magnitude))
        significant = defect > floor
        if not np.any(significant):
            return 0.0
        pair_scale = np.maximum(magnitude, magnitude[partner])
        return float(np.max(defect[significant] / pair_scale[significant]))

    def is_hermitian_mode3(self, tol: float = 1e-8) -> bool:
        return self.hermitian_defect() <= tol

    def require_hermitian_mode3(self, tol: float = 1e-8) -> None:
        defect = self.hermitian_defect()
        if defect > tol:
            raise SymmetryViolation(
                f"Fourier slices are not conjugate-symmetric (relative defect {defect:.3e} > {tol:.1e})"
            )

    def __repr__(self):
        n1, n2, n3 = self.dims
        return f"CTensor3({n1}x{n2}x{n3})"


def _check_same_dims(a, b) -> None:
    if a.dims != b.dims:
        raise DimMismatch(f"Dimension mismatch: {a.dims} vs {b.dims}")
