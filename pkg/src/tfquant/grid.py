"""Uniform time grids, sampled complex signals and analysis probes.

Conventions used throughout the library:

* the grid is periodic (a circle of circumference ``n*dt``); every shift
  and convolution is circular,
* integrals are plain Riemann sums weighted by ``dt`` (on a periodic grid
  with smooth decaying integrands this is spectrally accurate),
* the induced frequency grid carries the signed aliases
  ``w_k = 2*pi*k'/(n*dt)`` with ``k'`` in ``[-n/2, n/2)``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridMismatchError, ProbeError


@dataclass(frozen=True)
class UniformGrid:
    """Uniformly sampled time axis ``t_j = t0 + j*dt``, ``j = 0..n-1``."""

    n: int
    t0: float
    dt: float

    def __post_init__(self):
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @classmethod
    def centered(cls, n, dt):
        """Grid symmetric about t = 0 (``t0 = -n*dt/2``)."""
        return cls(n=n, t0=-0.5 * n * dt, dt=dt)

    @cached_property
    def times(self):
        t = self.t0 + self.dt * np.arange(self.n)
        t.flags.writeable = False
        return t

    @cached_property
    def omegas(self):
        """Angular frequencies in ascending order, ``[-pi/dt, pi/dt)``."""
        w = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(self.n, d=self.dt))
        w.flags.writeable = False
        return w

    @cached_property
    def omegas_fftorder(self):
        w = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dt)
        w.flags.writeable = False
        return w

    @cached_property
    def lags(self):
        """Signed circular lags ``(j - n/2)*dt`` (ascending, like omegas)."""
        u = self.dt * (np.arange(self.n) - self.n // 2)
        u.flags.writeable = False
        return u

    @property
    def span(self):
        return self.n * self.dt

    @property
    def domega(self):
        return 2.0 * np.pi / (self.n * self.dt)

    @property
    def omega_max(self):
        """Band edge pi/dt (exclusive)."""
        return np.pi / self.dt


class Signal:
    """Complex finite-energy signal sampled on a :class:`UniformGrid`."""

    def __init__(self, grid, samples):
        samples = np.asarray(samples, dtype=np.complex128)
        if samples.shape != (grid.n,):
            raise ValueError(
                f"samples must have shape ({grid.n},), got {samples.shape}"
            )
        samples = samples.copy()
        samples.flags.writeable = False
        self.grid = grid
        self.samples = samples

    def with_samples(self, samples):
        return Signal(self.grid, samples)

    def __repr__(self):
        return f"Signal(n={self.grid.n}, energy={energy(self):.6g})"


def _check_same_grid(x, y):
    if x.grid != y.grid:
        raise GridMismatchError(f"grid mismatch: {x.grid} vs {y.grid}")


def inner_product(x, y):
    """Quadrature inner product ``sum conj(x_j) y_j dt``.

    Conjugate-linear in the first slot.
    """
    _check_same_grid(x, y)
    return complex(np.vdot(x.samples, y.samples) * x.grid.dt)


def energy(s):
    return float(np.sum(np.abs(s.samples) ** 2) * s.grid.dt)


def norm(s):
    return float(np.sqrt(energy(s)))


class Probe:
    """Unit-norm analysis window with cached autocorrelation and intensity.

    ``sigma`` is an optional width tag carried by Gaussian probes; closed
    forms keyed on it (autocorrelation, phase-space overlap) are available
    only when it is set.
    """

    def __init__(self, signal, sigma=None, label="probe"):
        nrm = norm(signal)
        if nrm == 0.0:
            raise ProbeError("cannot normalize a zero signal into a probe")
        self.base = Signal(signal.grid, signal.samples / nrm)
        self.sigma = sigma
        self.label = label
        self._autocorr = None

    @property
    def grid(self):
        return self.base.grid

    @property
    def samples(self):
        return self.base.samples

    @property
    def intensity(self):
        """Pointwise power |psi(t_j)|^2; quadrature sum (times dt) is 1."""
        return np.abs(self.base.samples) ** 2

    @property
    def autocorr(self):
        if self._autocorr is None:
            self._autocorr = autocorrelation(self)
        return self._autocorr


def make_gaussian_probe(grid, sigma):
    """Normalized centered Gaussian window of width ``sigma``.

    Samples ``pi**(-1/4) sigma**(-1/2) exp(-t^2/(2 sigma^2))``, renormalized
    on the grid.  The width must be resolvable and non-wrapping:
    ``4*dt <= sigma <= n*dt/8``.
    """
    if sigma < 4.0 * grid.dt:
        raise ProbeError(
            f"sigma={sigma} violates the resolvability bound sigma >= 4*dt = {4.0 * grid.dt}"
        )
    if sigma > grid.span / 8.0:
        raise ProbeError(
            f"sigma={sigma} violates the non-wrapping bound sigma <= n*dt/8 = {grid.span / 8.0}"
        )
    t = grid.times
    samples = np.pi ** (-0.25) / np.sqrt(sigma) * np.exp(-(t**2) / (2.0 * sigma**2))
    return Probe(Signal(grid, samples), sigma=sigma, label=f"gaussian:{sigma:g}")


def autocorrelation(p):
    """Circular autocorrelation ``R(u_m) = sum_j psi_j conj(psi_{j-m}) dt``.

    Returned on the probe's grid with sample ``j`` holding the lag
    ``(j - n/2)*dt``; for grids centered at zero this is the time axis
    itself.  Satisfies ``R(-u) = conj(R(u))`` and ``R(0) = 1``.
    """
    psi = p.base.samples
    ft = np.fft.fft(psi)
    r = np.fft.ifft(ft * np.conj(ft)) * p.grid.dt
    return Signal(p.grid, np.fft.fftshift(r))
