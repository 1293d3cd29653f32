"""Unitary discrete Fourier transform and the time/frequency operators.

The transform follows the symmetric convention

    shat(w_k) = dt/sqrt(2*pi) * sum_j exp(-i w_k t_j) s_j,

with the signed frequency grid of :class:`~tfquant.grid.UniformGrid`.  With
the induced spectral measure ``dw = 2*pi/(n*dt)`` the transform is exactly
unitary, so Plancherel holds to rounding error.

The multiplication operator T = diag(t_j) and the spectral derivative
Omega = F^dag diag(w_k) F are both Hermitian matrices.  Their commutator
satisfies [T, Omega] = i*1 only weakly (on well-localized band-limited
vectors): the matrix identity is impossible in finite dimension since the
commutator of matrices is traceless.
"""

from functools import lru_cache

import numpy as np

from .errors import GridMismatchError
from .grid import Signal, norm

_HERMITIAN_RTOL = 1e-9


class Spectrum:
    """DFT samples stored in ascending-frequency order."""

    def __init__(self, grid, samples):
        samples = np.asarray(samples, dtype=np.complex128)
        if samples.shape != (grid.n,):
            raise ValueError(f"expected shape ({grid.n},), got {samples.shape}")
        samples = samples.copy()
        samples.flags.writeable = False
        self.grid = grid
        self.samples = samples

    @property
    def omegas(self):
        return self.grid.omegas

    def energy(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.domega)


def dft(s):
    """Forward transform; ``idft(dft(s))`` reproduces ``s`` to ~1e-15."""
    g = s.grid
    raw = np.fft.fft(s.samples)
    phase = np.exp(-1j * g.omegas_fftorder * g.t0)
    shat = g.dt / np.sqrt(2.0 * np.pi) * phase * raw
    return Spectrum(g, np.fft.fftshift(shat))


def idft(spec):
    g = spec.grid
    shat = np.fft.ifftshift(spec.samples)
    raw = shat * np.exp(1j * g.omegas_fftorder * g.t0)
    samples = np.fft.ifft(raw) * np.sqrt(2.0 * np.pi) / g.dt
    return Signal(g, samples)


class LinearOperator:
    """Dense matrix realization of an operator on a grid.

    The matrix acts directly on sample vectors: ``(A s)_j = sum_l M[j,l] s_l``.
    Integral kernels are therefore stored dt-weighted.
    """

    def __init__(self, grid, matrix, hermitian=False, label=""):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (grid.n, grid.n):
            raise ValueError(f"expected shape ({grid.n},{grid.n}), got {matrix.shape}")
        matrix = matrix.copy()
        if hermitian:
            defect = hermiticity_defect(matrix)
            if defect > _HERMITIAN_RTOL:
                raise ValueError(
                    f"hermitian flag set but relative defect is {defect:.3e}"
                )
        matrix.flags.writeable = False
        self.grid = grid
        self.matrix = matrix
        self.hermitian = hermitian
        self.label = label

    def apply(self, s):
        if s.grid != self.grid:
            raise GridMismatchError("operator and signal grids differ")
        return Signal(self.grid, self.matrix @ s.samples)

    def compose(self, other):
        if other.grid != self.grid:
            raise GridMismatchError("operator grids differ")
        return LinearOperator(self.grid, self.matrix @ other.matrix)

    def adjoint(self):
        return LinearOperator(
            self.grid, self.matrix.conj().T, hermitian=self.hermitian
        )

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"LinearOperator(n={self.grid.n}{tag}, hermitian={self.hermitian})"


def hermiticity_defect(matrix):
    """max|M - M^dag| normalized by max|M| (0 for the zero matrix)."""
    scale = np.max(np.abs(matrix))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)) / scale)


def identity_operator(grid):
    return LinearOperator(grid, np.eye(grid.n), hermitian=True, label="identity")


@lru_cache(maxsize=16)
def dft_matrix(grid):
    """Unitary DFT matrix F[k,j] = exp(-i w_k t_j)/sqrt(n), ascending w.

    Relates to :func:`dft` by ``dft(s).samples = sqrt(dt/domega) * F @ s``;
    the common factor makes F exactly unitary on plain sample vectors.
    """
    w = grid.omegas[:, None]
    t = grid.times[None, :]
    return np.exp(-1j * w * t) / np.sqrt(grid.n)


def time_operator(grid):
    return LinearOperator(
        grid, np.diag(grid.times.astype(np.complex128)), hermitian=True, label="T"
    )


@lru_cache(maxsize=16)
def _frequency_matrix(grid):
    f = dft_matrix(grid)
    return f.conj().T @ (grid.omegas[:, None] * f)


def frequency_operator(grid):
    return LinearOperator(grid, _frequency_matrix(grid), hermitian=True, label="Omega")


def commutator(a, b):
    if a.grid != b.grid:
        raise GridMismatchError("operator grids differ")
    return LinearOperator(a.grid, a.matrix @ b.matrix - b.matrix @ a.matrix)


def apply_frequency_operator(s):
    """Cheap FFT action of the spectral derivative (no matrix assembly)."""
    g = s.grid
    spec = dft(s)
    return idft(Spectrum(g, g.omegas * spec.samples))


def uncertainty_product(s):
    """Delta_s T * Delta_s Omega for a nonzero signal (normalized internally)."""
    if norm(s) == 0.0:
        raise ValueError("uncertainty product of the zero signal is undefined")
    g = s.grid
    x = s.samples / norm(s)
    w_t = np.abs(x) ** 2 * g.dt
    m1 = float(np.sum(g.times * w_t))
    m2 = float(np.sum(g.times**2 * w_t))
    var_t = max(m2 - m1**2, 0.0)

    spec = dft(Signal(g, x)).samples
    w_w = np.abs(spec) ** 2 * g.domega
    w_w /= np.sum(w_w)
    m1w = float(np.sum(g.omegas * w_w))
    m2w = float(np.sum(g.omegas**2 * w_w))
    var_w = max(m2w - m1w**2, 0.0)
    return float(np.sqrt(var_t) * np.sqrt(var_w))


def modulation_matrix(grid, omega):
    """diag(exp(i*omega*t_j)) = exp(i*omega*T)."""
    return np.diag(np.exp(1j * omega * grid.times))


def shift_matrix(grid, b):
    """Spectral circular shift exp(-i*b*Omega): (S s)(t) = s(t - b).

    Exact circulant built from the band-limited interpolation phases; for
    ``b`` commensurate with ``dt`` it is a permutation matrix.
    """
    phases = np.exp(-1j * b * grid.omegas_fftorder)
    col = np.fft.ifft(phases)
    idx = (np.arange(grid.n)[:, None] - np.arange(grid.n)[None, :]) % grid.n
    return col[idx]


def weyl_relation_check(sigma, tau, grid, n_vectors=5):
    """Residual of exp(i sigma Omega) exp(i tau T) = exp(i sigma tau) exp(i tau T) exp(i sigma Omega).

    Returns the largest ``||(L - R) v|| / ||v||`` over a family of shifted
    and modulated Gaussian test vectors supported on the grid interior.
    """
    exp_t = modulation_matrix(grid, tau)
    exp_w = shift_matrix(grid, -sigma)
    lhs = exp_w @ exp_t
    rhs = np.exp(1j * sigma * tau) * (exp_t @ exp_w)
    diff = lhs - rhs
    worst = 0.0
    for v in _gaussian_test_vectors(grid, n_vectors):
        worst = max(worst, float(np.linalg.norm(diff @ v) / np.linalg.norm(v)))
    return worst


def _gaussian_test_vectors(grid, k):
    """Unit Gaussians spread over the interior half of the grid and band."""
    centers = np.linspace(-0.15, 0.15, k) * grid.span
    sig = max(grid.span / 32.0, 4.0 * grid.dt)
    out = []
    for i, c in enumerate(centers):
        w0 = (i - k // 2) * grid.omega_max / (2 * max(k, 1))
        v = np.exp(-((grid.times - c) ** 2) / (2 * sig**2) + 1j * w0 * grid.times)
        out.append(v / np.linalg.norm(v))
    return out


def operator_norm_estimate(op, iters=50, tol=1e-9, seed=0):
    """Largest singular value by power iteration on A^dag A."""
    a = op.matrix if isinstance(op, LinearOperator) else np.asarray(op)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iters):
        w = a.conj().T @ (a @ v)
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - prev) <= tol * max(lam, 1.0):
            prev = lam
            break
        prev = lam
    return float(np.sqrt(prev))
