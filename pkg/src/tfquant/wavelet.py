"""Time-scale (continuous wavelet) analysis.

Atoms are translated dilates ``psi_{b,a}(t) = psi((t-b)/a)/sqrt(a)`` with
``a > 0`` and the half-plane measure ``db da / a^2``; on the geometric scale
grid ``a_j = a_min q^j`` the measure weight per node is ``ln(q)/a_j``.
Inversion divides by the admissibility constant

    c = 2 pi * integral_0^inf |psi_hat(w)|^2 dw / w,

which requires a zero-mean window with modulus-even spectrum.

Note the dilation convention: scaling time by ``a`` scales frequency by
``1/a`` (``dft`` of ``psi(t/a)/sqrt(a)`` is ``sqrt(a) psi_hat(a w)``), so
analyses phrased on the frequency half-line use the reciprocal scale; the
bridge is exercised in the test suite and in tfquant.quantaffine.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import AdmissibilityError, LatticeError, SymmetryError
from .fourier import LinearOperator, dft
from .grid import Probe, Signal

__all__ = [
    "ScaleGrid",
    "Wavelet",
    "WaveletCoeffs",
    "admissibility_constant",
    "cwt",
    "icwt",
    "make_wavelet",
    "mexican_hat",
    "morlet",
    "wavelet_resolution_check",
]


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric scale axis a_j = a_min * q**j, j = 0..m-1."""

    a_values: np.ndarray
    q: float

    def __post_init__(self):
        a = np.asarray(self.a_values, dtype=float)
        if len(a) == 0 or np.any(a <= 0):
            raise LatticeError("scales must be strictly positive")
        if len(a) > 1:
            ratios = a[1:] / a[:-1]
            if np.max(np.abs(ratios - self.q)) > 1e-9 * self.q:
                raise LatticeError("scales must form a geometric progression")
        if not self.q > 1:
            raise LatticeError("scale ratio q must exceed 1")
        a.flags.writeable = False
        object.__setattr__(self, "a_values", a)

    @classmethod
    def geometric(cls, a_min, octaves, voices=8):
        q = 2.0 ** (1.0 / voices)
        m = int(round(octaves * voices)) + 1
        return cls(a_min * q ** np.arange(m), q)

    @property
    def log_weight(self):
        """Quadrature weight of da/a per node."""
        return float(np.log(self.q))

    def measure_weights(self):
        """Per-node weights of the half-plane measure da/a^2."""
        return self.log_weight / self.a_values


class Wavelet:
    """Admissible analysis window: unit-norm probe plus its constant c."""

    def __init__(self, base, c_psi, mother=None, label="wavelet"):
        if not c_psi > 0:
            raise AdmissibilityError(f"admissibility constant must be positive, got {c_psi}")
        self.base = base
        self.c_psi = float(c_psi)
        self.mother = mother
        self.label = label

    @property
    def grid(self):
        return self.base.grid

    @property
    def time_width(self):
        """RMS width of |psi|^2, used for scale-resolvability bounds."""
        g = self.grid
        return float(np.sqrt(np.sum(g.times**2 * self.base.intensity) * g.dt))

    def sampled_dilate(self, a):
        """psi((t)/a)/sqrt(a) on the grid lags (natural order)."""
        g = self.grid
        if self.mother is not None:
            return np.asarray(self.mother(g.lags / a), dtype=np.complex128) / np.sqrt(a)
        raise ValueError("wavelet has no closed-form mother to dilate")


class WaveletCoeffs:
    """CWT values S[b_i, a_j] with the constants needed to invert them."""

    def __init__(self, grid, b_values, scale_grid, values, c_psi):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (len(b_values), len(scale_grid.a_values)):
            raise ValueError("coefficient shape does not match the lattice")
        values = values.copy()
        values.flags.writeable = False
        self.grid = grid
        self.b_values = np.asarray(b_values, dtype=float)
        self.scale_grid = scale_grid
        self.values = values
        self.c_psi = float(c_psi)
        self.db = float(b_values[1] - b_values[0]) if len(b_values) > 1 else grid.dt

    def energy(self):
        """(1/c) sum |S|^2 db ln(q)/a."""
        w = self.scale_grid.measure_weights()
        return float(
            np.sum(np.abs(self.values) ** 2 * w[None, :]) * self.db / self.c_psi
        )


def admissibility_integral(samples, grid):
    """2 pi * sum_{w>0} |shat|^2 / w dw for raw samples (no normalization).

    Returns (positive-side, negative-side) values.
    """
    shat = dft(Signal(grid, samples)).samples
    w = grid.omegas
    pos = w > 0
    neg = w < 0
    c_pos = 2 * np.pi * float(np.sum(np.abs(shat[pos]) ** 2 / w[pos]) * grid.domega)
    c_neg = 2 * np.pi * float(np.sum(np.abs(shat[neg]) ** 2 / -w[neg]) * grid.domega)
    return c_pos, c_neg


def admissibility_constant(p):
    """Admissibility constant of a probe (or raw signal).

    Requires a zero-mean window (|psi_hat(0)| <= 1e-8) whose spectrum is
    modulus-even: the positive- and negative-frequency integrals must agree
    to 1e-3 relative, else the constant is convention-dependent.
    """
    if isinstance(p, Probe):
        samples, grid = p.base.samples, p.grid
    else:
        samples, grid = p.samples, p.grid
    shat = dft(Signal(grid, samples)).samples
    k0 = int(np.argmin(np.abs(grid.omegas)))
    if abs(shat[k0]) > 1e-8:
        raise AdmissibilityError(
            f"window has nonzero mean: |psi_hat(0)| = {abs(shat[k0]):.3e} > 1e-8"
        )
    c_pos, c_neg = admissibility_integral(samples, grid)
    scale = max(c_pos, c_neg)
    if scale > 0 and abs(c_pos - c_neg) > 1e-3 * scale:
        raise SymmetryError(
            f"spectrum is not modulus-even: c+={c_pos:.6g}, c-={c_neg:.6g}"
        )
    if not c_pos > 0:
        raise AdmissibilityError("admissibility integral vanishes")
    return c_pos


def make_wavelet(grid, mother, label="wavelet"):
    probe = Probe(Signal(grid, mother(grid.times)), label=label)
    c = admissibility_constant(probe)
    return Wavelet(probe, c, mother=mother, label=label)


def mexican_hat(grid):
    """Second-derivative-of-Gaussian window, L2-normalized."""

    def mother(t):
        return 2.0 / np.sqrt(3.0) * np.pi ** (-0.25) * (1.0 - t**2) * np.exp(-(t**2) / 2)

    return make_wavelet(grid, mother, label="mexican-hat")


def morlet(grid, omega0=6.0):
    """Zero-mean-corrected real Morlet window (cosine carrier).

    The real carrier keeps |psi_hat| even, which the admissibility check
    requires; the correction term subtracts the residual mean exactly.
    """
    kappa = np.exp(-(omega0**2) / 2)
    norm2 = np.sqrt(np.pi) * (
        0.5 * (1 + np.exp(-(omega0**2)))
        - 2 * np.exp(-3 * omega0**2 / 4)
        + np.exp(-(omega0**2))
    )
    c = 1.0 / np.sqrt(norm2)

    def mother(t):
        return c * (np.cos(omega0 * t) - kappa) * np.exp(-(t**2) / 2)

    return make_wavelet(grid, mother, label=f"morlet:{omega0:g}")


def _check_scales(w, scales):
    g = w.grid
    width = w.time_width
    a_min = float(np.min(scales.a_values))
    a_max = float(np.max(scales.a_values))
    if a_min * width < 4.0 * g.dt:
        raise LatticeError(
            f"smallest scale unresolvable: a_min*width = {a_min * width:.4g} < 4*dt = {4 * g.dt:.4g}"
        )
    if a_max * width > g.span / 8.0:
        raise LatticeError(
            f"largest scale wraps: a_max*width = {a_max * width:.4g} > span/8 = {g.span / 8:.4g}"
        )


def _b_stride(grid, b_values):
    b = np.asarray(b_values, dtype=float)
    if len(b) == 0:
        raise LatticeError("empty b axis")
    stride = 1 if len(b) < 2 else (b[1] - b[0]) / grid.dt
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise LatticeError("b values must be grid times with a uniform stride")
    offset = (b[0] - grid.t0) / grid.dt
    if abs(offset - round(offset)) > 1e-9:
        raise LatticeError("b values must lie on the grid")
    expect = grid.t0 + grid.dt * (round(offset) + round(stride) * np.arange(len(b)))
    if np.max(np.abs(b - expect)) > 1e-9 * grid.dt:
        raise LatticeError("b values must be uniformly strided grid times")
    return int(round(stride)), int(round(offset))


def cwt(s, w, b_values, scales):
    """S[b, a] = <psi_{b,a} | s>, one FFT pass per scale."""
    _check_scales(w, scales)
    g = s.grid
    stride, offset = _b_stride(g, b_values)
    s_hat = np.fft.fft(s.samples)
    vals = np.empty((len(b_values), len(scales.a_values)), dtype=np.complex128)
    for j, a in enumerate(scales.a_values):
        ha = np.fft.ifftshift(w.sampled_dilate(a))
        corr = np.fft.ifft(s_hat * np.conj(np.fft.fft(ha))) * g.dt
        vals[:, j] = corr[offset::stride][: len(b_values)]
    return WaveletCoeffs(g, b_values, scales, vals, w.c_psi)


def icwt(coeffs, w):
    """Resum (1/c) sum S(b,a) psi_{b,a}(t) db ln(q)/a over the lattice."""
    g = coeffs.grid
    stride, offset = _b_stride(g, coeffs.b_values)
    weights = coeffs.scale_grid.measure_weights()
    out = np.zeros(g.n, dtype=np.complex128)
    full = np.zeros(g.n, dtype=np.complex128)
    for j, a in enumerate(coeffs.scale_grid.a_values):
        full[:] = 0.0
        full[offset::stride][: len(coeffs.b_values)] = coeffs.values[:, j]
        ha = np.fft.ifftshift(w.sampled_dilate(a))
        conv = np.fft.ifft(np.fft.fft(full) * np.fft.fft(ha))
        out += weights[j] * conv
    out *= coeffs.db / w.c_psi
    return Signal(g, out)


def wavelet_resolution_check(w, b_values, scales):
    """Accumulate R = (1/c) sum |psi_{b,a}><psi_{b,a}| db ln(q)/a as a matrix."""
    g = w.grid
    if g.n > 512:
        raise ValueError("dense resolution matrix is limited to n <= 512")
    if len(b_values) == 0 or len(scales.a_values) == 0:
        return LinearOperator(g, np.zeros((g.n, g.n)), label="cwt-resolution")
    stride, offset = _b_stride(g, b_values)
    db = stride * g.dt
    acc = np.zeros((g.n, g.n), dtype=np.complex128)
    mweights = scales.measure_weights()
    shifts = (offset + stride * np.arange(len(b_values))) % g.n
    for j, a in enumerate(scales.a_values):
        ha = np.fft.ifftshift(w.sampled_dilate(a))
        atoms = np.stack([np.roll(ha, m) for m in shifts])
        weight = mweights[j] * db * g.dt / w.c_psi
        acc += kernels.rank_one_sum(atoms, np.full(len(shifts), weight))
    return LinearOperator(g, acc, label="cwt-resolution")
