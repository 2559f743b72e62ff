"""
t-product algebra on dense third-order tensors.

All products are evaluated slice-wise in the Fourier domain along mode 3.
Only slices 0..n3//2 are computed; the remaining slices are their complex
conjugates, which keeps results exactly real after the inverse transform.
The DFT is unnormalized forward and 1/n3-normalized inverse.
"""

import numpy as np

from .exceptions import DimMismatch
from .tensor_types import CTensor3, Tensor3


# Symmetry tolerance accepted by idft_mode3
HERMITIAN_TOL = 1e-8


def half_slices(n3: int) -> int:
    """Number of Fourier slices that determine the rest by conjugation"""
    return n3 // 2 + 1


def mirror_half(half: np.ndarray, n3: int) -> np.ndarray:
    """Complete a stack of the first half_slices(n3) Fourier slices.

    ``half`` has the slice index on its last axis; slice k >= half_slices(n3)
    is filled with the conjugate of slice n3 - k.
    """
    h = half_slices(n3)
    full = np.empty(half.shape[:-1] + (n3,), dtype=np.complex128)
    full[..., :h] = half[..., :h]
    if n3 > h:
        full[..., h:] = np.conj(half[..., 1:n3 - h + 1][..., ::-1])
    return full


def dft_mode3(t: Tensor3) -> CTensor3:
    """Unnormalized forward DFT of every tube t[i, j, :]"""
    return CTensor3(np.fft.fft(t.data, axis=2))


def idft_mode3(c: CTensor3) -> Tensor3:
    """Inverse of dft_mode3.

    Raises:
        SymmetryViolation: the input is not the DFT image of a real tensor.
    """
    c.require_hermitian_mode3(HERMITIAN_TOL)
    return Tensor3(np.fft.ifft(c.data, axis=2).real)


def from_fourier_half(half: np.ndarray, n3: int) -> Tensor3:
    """Real tensor whose first half_slices(n3) Fourier slices are ``half``"""
    return Tensor3(np.fft.ifft(mirror_half(half, n3), axis=2).real)


def t_product(a: Tensor3, b: Tensor3) -> Tensor3:
    """t-product a * b of an n1 x l x n3 and an l x n2 x n3 tensor"""
    n1, l, n3 = a.dims
    lb, n2, n3b = b.dims
    if l != lb or n3 != n3b:
        raise DimMismatch(f"t_product needs a: n1 x l x n3 and b: l x n2 x n3, got {a.dims} and {b.dims}")
    h = half_slices(n3)
    a_hat = np.fft.fft(a.data, axis=2)[:, :, :h]
    b_hat = np.fft.fft(b.data, axis=2)[:, :, :h]
    prod = np.einsum('ilk,ljk->ijk', a_hat, b_hat)
    return from_fourier_half(prod, n3)


def conj_transpose(a: Tensor3) -> Tensor3:
    """Transpose every frontal slice and reverse the order of slices 2..n3"""
    n3 = a.dims[2]
    order = (-np.arange(n3)) % n3
    return Tensor3(a.data.transpose(1, 0, 2)[:, :, order])


def identity_tensor(n: int, n3: int) -> Tensor3:
    """n x n x n3 tensor whose first frontal slice is I_n and the rest zero"""
    if n < 1 or n3 < 1:
        raise DimMismatch(f"identity_tensor needs n, n3 >= 1, got ({n}, {n3})")
    data = np.zeros((n, n, n3))
    data[:, :, 0] = np.eye(n)
    return Tensor3(data)


def fro_norm(t: Tensor3) -> float:
    return float(np.linalg.norm(t.data.ravel()))


def l1_norm(t: Tensor3) -> float:
    return float(np.sum(np.abs(t.data)))


def inner(a: Tensor3, b: Tensor3) -> float:
    if a.dims != b.dims:
        raise DimMismatch(f"inner needs matching dims, got {a.dims} and {b.dims}")
    return float(np.vdot(a.data.ravel(), b.data.ravel()))


def fourier_fro_norm(c: CTensor3) -> float:
    return float(np.linalg.norm(c.data.ravel()))
