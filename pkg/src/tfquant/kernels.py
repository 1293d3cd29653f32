"""Shared assembly kernels for the dense operator builders.

Both routines reduce the naive O(n^3)-ish accumulation loops to FFT and
BLAS primitives; they dominate the runtime of the quantization and
resolution-of-identity builders.
"""

import numpy as np


def symbol_kernel(psi, fhat_lags, scale):
    """Accumulate A[j,l] = scale * sum_m psi[j-m] conj(psi[l-m]) fhat[m, l-j].

    All indices are circular (mod n).  ``psi`` is the window sampled on the
    grid, ``fhat_lags[m, d]`` the partial transform of the symbol at time
    index ``m`` and lag index ``d``.

    Evaluated lag-by-lag: the d-th circular diagonal of A is the circular
    convolution over m of ``fhat[:, d]`` with ``h_d(u) = psi[u] conj(psi[u+d])``,
    which turns the triple loop into one batched FFT pass.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    fhat_lags = np.asarray(fhat_lags, dtype=np.complex128)
    n = psi.shape[0]
    idx = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    h = psi[:, None] * np.conj(psi[idx])  # h[u, d] = psi[u] conj(psi[u+d])
    diag = np.fft.ifft(np.fft.fft(fhat_lags, axis=0) * np.fft.fft(h, axis=0), axis=0)
    a = np.empty((n, n), dtype=np.complex128)
    a[np.arange(n)[:, None], idx] = diag
    return scale * a


def rank_one_sum(atoms, weights):
    """R[j,l] = sum_k weights[k] atoms[k,j] conj(atoms[k,l]) via one GEMM."""
    atoms = np.asarray(atoms, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.float64)
    return (weights[:, None] * atoms).T @ atoms.conj()
