"""Time-frequency (Gabor) analysis.

Atoms are modulated translates ``psi_{b,w}(t) = exp(i w t) psi(t - b)`` of a
unit-norm probe.  The transform ``S(b, w) = <psi_{b,w} | s>`` is computed by
one FFT per time shift; with the plane measure ``db dw / (2 pi)`` a dense
lattice conserves energy and resolves the identity.

Fractional time shifts are spectral (multiplication by ``exp(-i b w)`` in the
frequency domain), which is exact for the band-limited content of the grid
and keeps the covariance identities tight.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BandLimitError, GridMismatchError, LatticeError
from .fourier import LinearOperator, modulation_matrix, shift_matrix
from .grid import Signal
from . import kernels

_UNIFORM_RTOL = 1e-9


def _check_uniform(values, name):
    if len(values) < 2:
        return float("nan")
    steps = np.diff(values)
    step = float(steps[0])
    if np.max(np.abs(steps - step)) > _UNIFORM_RTOL * max(abs(step), 1.0):
        raise LatticeError(f"{name} axis is not uniformly spaced")
    return step


@dataclass(frozen=True)
class TFLattice:
    """Rectangular phase-space lattice; node weight is ``db*domega/(2*pi)``."""

    b_values: np.ndarray
    omega_values: np.ndarray
    db: float
    domega: float

    def __post_init__(self):
        b = np.asarray(self.b_values, dtype=float)
        w = np.asarray(self.omega_values, dtype=float)
        b.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "b_values", b)
        object.__setattr__(self, "omega_values", w)
        sb = _check_uniform(b, "b")
        sw = _check_uniform(w, "omega")
        if not np.isnan(sb) and abs(sb - self.db) > _UNIFORM_RTOL * abs(self.db):
            raise LatticeError("db does not match the b axis spacing")
        if not np.isnan(sw) and abs(sw - self.domega) > _UNIFORM_RTOL * abs(self.domega):
            raise LatticeError("domega does not match the omega axis spacing")

    @property
    def node_weight(self):
        return self.db * self.domega / (2.0 * np.pi)

    @property
    def shape(self):
        return (len(self.b_values), len(self.omega_values))


def _pow2_at_most(k):
    p = 1
    while p * 2 <= k:
        p *= 2
    return p


def default_lattice(grid, sigma):
    """Dense lattice matched to a probe of width sigma.

    Time strides aim at ``db = sigma/4`` and frequency strides at
    ``domega = 1/(4*sigma)``, rounded down to power-of-two strides so the
    lattice tiles the periodic grid exactly; the full band is covered.
    """
    bs = _pow2_at_most(max(1, int(sigma / (4.0 * grid.dt))))
    ws = _pow2_at_most(max(1, int(1.0 / (4.0 * sigma) / grid.domega)))
    return TFLattice(
        b_values=grid.times[::bs],
        omega_values=grid.omegas[::ws],
        db=bs * grid.dt,
        domega=ws * grid.domega,
    )


class GaborCoeffs:
    """Transform values S[b_i, w_k] on a :class:`TFLattice`."""

    def __init__(self, grid, lattice, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != lattice.shape:
            raise ValueError(f"expected {lattice.shape}, got {values.shape}")
        values = values.copy()
        values.flags.writeable = False
        self.grid = grid
        self.lattice = lattice
        self.values = values

    def energy(self):
        """Lattice sum of |S|^2 db domega / (2 pi)."""
        return float(np.sum(np.abs(self.values) ** 2) * self.lattice.node_weight)


def shifted_window(p, b):
    """Probe translated by ``b`` (circularly; spectral for fractional b)."""
    g = p.grid
    steps = b / g.dt
    if abs(steps - round(steps)) < 1e-12:
        return np.roll(p.samples, int(round(steps)) % g.n)
    spec = np.fft.fft(p.samples) * np.exp(-1j * b * g.omegas_fftorder)
    return np.fft.ifft(spec)


def gabor_atom(p, b, omega):
    """Unit-norm atom exp(i omega t) psi(t - b)."""
    g = p.grid
    if not (g.t0 - g.dt <= b <= g.t0 + g.span + g.dt):
        raise ValueError(f"shift b={b} outside the grid span [{g.t0}, {g.t0 + g.span}]")
    if not (-g.omega_max <= omega < g.omega_max):
        raise BandLimitError(
            f"omega={omega} outside the representable band [-pi/dt, pi/dt) = "
            f"[{-g.omega_max}, {g.omega_max})"
        )
    return Signal(g, np.exp(1j * omega * g.times) * shifted_window(p, b))


def _omega_indices(grid, omega_values):
    idx = np.rint((omega_values - grid.omegas[0]) / grid.domega).astype(int)
    if np.any(idx < 0) or np.any(idx >= grid.n):
        raise LatticeError("lattice omega values fall outside the grid band")
    if np.max(np.abs(grid.omegas[idx] - omega_values)) > 1e-9 * grid.domega:
        raise LatticeError("lattice omega values must lie on the grid frequencies")
    return idx


def gabor_transform(s, p, lattice):
    """S[b, w] = <psi_{b,w} | s> computed with one FFT per time shift."""
    g = s.grid
    if g != p.grid:
        raise GridMismatchError("signal and probe grids differ")
    idx = _omega_indices(g, lattice.omega_values)
    # dft ordering: ascending; dft = dt/sqrt(2pi) sum e^{-iwt}(.)
    phase = np.exp(-1j * g.omegas_fftorder * g.t0)
    vals = np.empty(lattice.shape, dtype=np.complex128)
    for i, b in enumerate(lattice.b_values):
        y = np.conj(shifted_window(p, b)) * s.samples
        spec = np.fft.fftshift(phase * np.fft.fft(y)) * g.dt
        vals[i] = spec[idx]
    return GaborCoeffs(g, lattice, vals)


def gabor_reconstruct(coeffs, p):
    """Resum S over the lattice: s(t) ~ sum S(b,w) e^{iwt} psi(t-b) db dw/(2 pi)."""
    g = p.grid
    lat = coeffs.lattice
    phases = np.exp(1j * np.outer(lat.omega_values, g.times))
    inner = coeffs.values @ phases  # (n_b, n)
    out = np.zeros(g.n, dtype=np.complex128)
    for i, b in enumerate(lat.b_values):
        out += inner[i] * shifted_window(p, b)
    return Signal(g, out * lat.node_weight)


def resolution_of_identity_matrix(p, lattice):
    """Accumulate R = sum |psi_{b,w}><psi_{b,w}| db dw / (2 pi) as a matrix."""
    g = p.grid
    if g.n > 1024:
        raise ValueError("dense resolution matrix is limited to n <= 1024")
    if lattice.shape[0] == 0 or lattice.shape[1] == 0:
        return LinearOperator(g, np.zeros((g.n, g.n)), label="gabor-resolution")
    mods = np.exp(1j * np.outer(lattice.omega_values, g.times))
    weight = lattice.node_weight * g.dt  # rank-one matvec matrix carries dt
    acc = np.zeros((g.n, g.n), dtype=np.complex128)
    w = np.full(lattice.shape[1], weight)
    for b in lattice.b_values:
        atoms = mods * shifted_window(p, b)[None, :]
        acc += kernels.rank_one_sum(atoms, w)
    return LinearOperator(g, acc, label="gabor-resolution")


@dataclass(frozen=True)
class WHGroupElement:
    """Central extension element (phase, time shift, frequency shift)."""

    varsigma: float
    b: float
    omega: float

    def compose(self, other):
        return WHGroupElement(
            self.varsigma
            + other.varsigma
            + 0.5 * (self.omega * other.b - other.omega * self.b),
            self.b + other.b,
            self.omega + other.omega,
        )

    def inverse(self):
        return WHGroupElement(-self.varsigma, -self.b, -self.omega)

    @classmethod
    def neutral(cls):
        return cls(0.0, 0.0, 0.0)


def wh_displacement(g_elem, grid):
    """Unitary U(varsigma, b, w) = e^{i varsigma} e^{-i w b/2} e^{i w T} e^{-i b Omega}.

    Satisfies ``U(0,b,w) psi = e^{-i w b / 2} psi_{b,w}`` and composes along
    the group law with the half-symplectic cocycle.
    """
    if abs(g_elem.omega) >= grid.omega_max:
        raise BandLimitError("frequency shift exceeds the band edge")
    scalar = np.exp(1j * g_elem.varsigma - 0.5j * g_elem.omega * g_elem.b)
    mat = scalar * (
        modulation_matrix(grid, g_elem.omega) @ shift_matrix(grid, g_elem.b)
    )
    return LinearOperator(grid, mat, label="wh-displacement")


def covariance_check(s, p, b0, omega0, lattice):
    """Largest lattice deviation of the displacement covariance identity

        S[U(0,b0,w0)s](b,w) = exp(-i (w - w0/2) b0) S[s](b-b0, w-w0).

    The phase carries a minus sign because the displacement moves from the
    ket to the bra where it is conjugated; a pure time shift (w0 = 0)
    reduces to the elementary exp(-i w b0) modulation of the coefficients.
    The comparison is restricted to lattice nodes whose shifted partner is
    on the lattice.
    """
    mb = b0 / lattice.db if lattice.db else 0.0
    mw = omega0 / lattice.domega if lattice.domega else 0.0
    if abs(mb - round(mb)) > 1e-9 or abs(mw - round(mw)) > 1e-9:
        raise LatticeError("(b0, omega0) must be integer multiples of (db, domega)")
    mb, mw = int(round(mb)), int(round(mw))

    u = wh_displacement(WHGroupElement(0.0, b0, omega0), s.grid)
    lhs = gabor_transform(u.apply(s), p, lattice).values
    s0 = gabor_transform(s, p, lattice).values

    nb, nw = lattice.shape
    bi = np.arange(nb)
    wi = np.arange(nw)
    valid_b = (bi - mb >= 0) & (bi - mb < nb)
    valid_w = (wi - mw >= 0) & (wi - mw < nw)
    if not valid_b.any() or not valid_w.any():
        raise LatticeError("shift moves every node off the lattice")
    rows = bi[valid_b]
    cols = wi[valid_w]
    shifted = s0[np.ix_(rows - mb, cols - mw)]
    phase = np.exp(-1j * (lattice.omega_values[cols] - 0.5 * omega0) * b0)
    rhs = phase[None, :] * shifted
    return float(np.max(np.abs(lhs[np.ix_(rows, cols)] - rhs)))
