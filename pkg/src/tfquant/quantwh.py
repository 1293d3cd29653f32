"""Operators from time-frequency symbols (Weyl-Heisenberg quantization).

Two independent routes build the same operators and cross-check each other:

* the window-kernel route: A_f has the integral kernel

      A(t, t') = (2 pi)^(-1/2) * integral db fhat_w(b, t'-t) psi(t-b) conj(psi(t'-b)),

  where ``fhat_w(b, y) = (2 pi)^(-1/2) integral dw f(b,w) exp(-i w y)`` is
  the partial transform of the symbol over frequency; equivalent to summing
  rank-one atom projectors f(b,w)|psi_bw><psi_bw| db dw/(2 pi);

* the apodized route: A_f = sum over the self-dual lattice of
  D(b,w) conj(Fs[f])(b,w) Pi(b,w) db dw/(2 pi), with D the displacement
  unitaries, Fs the symplectic Fourier transform and Pi an apodization
  weight.  Pi == 1 is the Weyl-Wigner rule, Pi = sin(bw)/(bw) the
  Born-Jordan rule, and Pi from the rank-one projector reproduces the
  window-kernel route.

The self-dual lattice pairs the n grid times with the n grid frequencies
(db*dw = 2 pi / n), on which the displacement phases resum exactly.

Monovariable symbols have closed forms: f = u(b) gives the multiplication
operator by |psi|^2 * u (a circular convolution), f = v(w) the convolution
operator with kernel (2 pi)^(-1/2) R(t-t') vhat(t'-t), with R the window
autocorrelation.

Semi-classical portraits smooth a symbol with the atom-overlap kernel
|<psi_bw|psi_b'w'>|^2, which for a Gaussian window of width sigma is
exp(-(b-b')^2/(2 sigma^2)) exp(-sigma^2 (w-w')^2/2): degree-2 polynomials
map to closed forms (b^2 -> b^2 + sigma^2, w^2 -> w^2 + 1/sigma^2,
bw -> bw) and the smoothing defeats any classical limit as sigma -> 0 or
sigma -> infinity.
"""

import numpy as np
from scipy.signal import fftconvolve

from . import kernels
from .errors import SymbolError, TruncationError, WeightError
from .fourier import LinearOperator, hermiticity_defect
from .gabor import TFLattice
from .grid import Signal

_SQRT2PI = np.sqrt(2.0 * np.pi)

__all__ = [
    "ApodizationWeight",
    "FiducialOperator",
    "SampledSymbol",
    "Symbol2D",
    "born_jordan_weight",
    "builtin_symbol",
    "classical_limit_scan",
    "doubled_parity",
    "gaussian_overlap_kernel",
    "interior_mask",
    "phase_lattice",
    "portrait_convolution_form",
    "probe_weight",
    "quantize_freq_symbol",
    "quantize_gabor",
    "quantize_gabor_coeffs",
    "quantize_gabor_sampled",
    "quantize_separable",
    "quantize_signal_self",
    "quantize_spectrum",
    "quantize_time_symbol",
    "quantize_with_apodization",
    "rank_one_projector",
    "semiclassical_portrait",
    "symbol_constants",
    "symplectic_fourier",
    "weyl_transform",
    "weyl_weight",
]


def phase_lattice(grid):
    """Self-dual lattice: grid times x grid frequencies, db*dw = 2 pi/n."""
    return TFLattice(grid.times, grid.omegas, grid.dt, grid.domega)


def interior_mask(lattice, frac=0.5):
    """Boolean mask selecting the central ``frac`` of both lattice axes."""
    nb, nw = lattice.shape
    mb = np.zeros(nb, dtype=bool)
    mw = np.zeros(nw, dtype=bool)
    mb[int(nb * (1 - frac) / 2) : int(nb * (1 + frac) / 2)] = True
    mw[int(nw * (1 - frac) / 2) : int(nw * (1 + frac) / 2)] = True
    return mb[:, None] & mw[None, :]


def _lag_index_shift(grid):
    """Rotation putting natural sample order into circular-lag order."""
    r = -grid.t0 / grid.dt
    if abs(r - round(r)) > 1e-9:
        raise ValueError(
            "phase-space quantization requires the grid origin to lie on the "
            f"sample lattice (t0/dt = {r} is not an integer)"
        )
    return int(round(r)) % grid.n


def _lag_order(grid, samples):
    """Reindex natural-order samples so index k holds the value at lag k*dt."""
    return np.roll(samples, -_lag_index_shift(grid))


class SampledSymbol:
    """Symbol values sampled on a :class:`TFLattice`."""

    def __init__(self, lattice, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != lattice.shape:
            raise ValueError(f"expected {lattice.shape}, got {values.shape}")
        self.lattice = lattice
        self.values = values

    def interior_values(self, frac=0.5):
        return self.values[interior_mask(self.lattice, frac)]


class Symbol2D:
    """Classical symbol f(b, w) given as a vectorized evaluator.

    ``partial_ft_omega(b, y)`` may supply the closed-form partial transform
    over frequency; it is validated against the FFT of the sampled symbol on
    a test lattice at construction (1e-6), so a wrong closed form fails
    immediately rather than poisoning the operators built from it.
    """

    def __init__(self, evaluator, partial_ft_omega=None, label="", test_grid=None):
        self.evaluator = evaluator
        self.partial_ft_omega = partial_ft_omega
        self.label = label
        if partial_ft_omega is not None:
            if test_grid is None:
                raise SymbolError(
                    "a closed-form partial transform needs a test_grid to be "
                    "validated against the FFT route"
                )
            self._validate_partial_ft(test_grid)

    def sample(self, b_values, omega_values):
        bg, wg = np.meshgrid(b_values, omega_values, indexing="ij")
        return np.asarray(self.evaluator(bg, wg), dtype=np.complex128) + np.zeros(
            bg.shape, dtype=np.complex128
        )

    def _validate_partial_ft(self, grid):
        numeric = _partial_ft_omega_samples(self, grid, use_closed_form=False)
        closed = _partial_ft_omega_samples(self, grid, use_closed_form=True)
        scale = max(float(np.max(np.abs(numeric))), 1e-30)
        defect = float(np.max(np.abs(numeric - closed))) / scale
        if defect > 1e-6:
            raise SymbolError(
                f"closed-form partial transform disagrees with the FFT route "
                f"(relative defect {defect:.3e} > 1e-6)"
            )


def builtin_symbol(name):
    """Named polynomial symbols used throughout the checks and the CLI."""
    table = {
        "one": lambda b, w: np.ones_like(b, dtype=complex),
        "b": lambda b, w: b + 0j,
        "omega": lambda b, w: w + 0j,
        "b2": lambda b, w: b**2 + 0j,
        "omega2": lambda b, w: w**2 + 0j,
        "bw": lambda b, w: b * w + 0j,
        "harmonic": lambda b, w: b**2 + w**2 + 0j,
    }
    if name not in table:
        raise KeyError(
            f"unknown symbol {name!r}; valid names: {', '.join(sorted(table))}"
        )
    return Symbol2D(table[name], label=name)


def _partial_ft_omega_samples(f, grid, use_closed_form=None):
    """fhat_w(b_m, y_d) on the full (time x lag) lattice, lag index fft-ordered."""
    n = grid.n
    use_closed = (
        f.partial_ft_omega is not None if use_closed_form is None else use_closed_form
    )
    if use_closed:
        lags = grid.dt * np.fft.ifftshift(np.arange(n) - n // 2)
        bg, yg = np.meshgrid(grid.times, lags, indexing="ij")
        return np.asarray(f.partial_ft_omega(bg, yg), dtype=np.complex128) + np.zeros(
            bg.shape, dtype=np.complex128
        )
    vals = f.sample(grid.times, grid.omegas)  # (b, w ascending)
    vals = np.fft.ifftshift(vals, axes=1)  # w into fft order
    return np.fft.fft(vals, axis=1) * grid.domega / _SQRT2PI


def quantize_gabor(f, p):
    """Dense operator from the window-kernel route."""
    grid = p.grid
    fhat = _partial_ft_omega_samples(f, grid)
    return _kernel_operator(fhat, p, label=f"gabor[{f.label}]")


def quantize_gabor_sampled(values, p):
    """Window-kernel route from symbol samples on the self-dual lattice."""
    grid = p.grid
    vals = np.fft.ifftshift(np.asarray(values, dtype=np.complex128), axes=1)
    fhat = np.fft.fft(vals, axis=1) * grid.domega / _SQRT2PI
    return _kernel_operator(fhat, p, label="gabor[sampled]")


def _kernel_operator(fhat, p, label):
    grid = p.grid
    psi_lag = _lag_order(grid, p.samples)
    scale = grid.dt * grid.dt / _SQRT2PI  # db from the b-sum, dt from kernel->matvec
    mat = kernels.symbol_kernel(psi_lag, fhat, scale)
    herm = hermiticity_defect(mat) <= 1e-8
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return LinearOperator(grid, mat, hermitian=herm, label=label)


def _as_b_samples(u, grid):
    if callable(u):
        return np.asarray(u(grid.times), dtype=np.complex128) + np.zeros(
            grid.n, dtype=np.complex128
        )
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} samples on the time axis")
    return u


def quantize_time_symbol(u, p):
    """f = u(b): multiplication by the smoothed symbol (|psi|^2 * u)."""
    grid = p.grid
    uvals = _as_b_samples(u, grid)
    intensity_lag = _lag_order(grid, p.intensity.astype(np.complex128))
    diag = np.fft.ifft(np.fft.fft(uvals) * np.fft.fft(intensity_lag)) * grid.dt
    herm = bool(np.max(np.abs(diag.imag)) <= 1e-12 * max(np.max(np.abs(diag)), 1e-30))
    return LinearOperator(
        grid, np.diag(diag), hermitian=herm, label="gabor[time-symbol]"
    )


def _freq_symbol_lag_transform(v, grid):
    """vhat(y_d) on the fft-ordered lag axis from v sampled on the frequencies."""
    if callable(v):
        vals = np.asarray(v(grid.omegas), dtype=np.complex128) + np.zeros(
            grid.n, dtype=np.complex128
        )
    else:
        vals = np.asarray(v, dtype=np.complex128)
        if vals.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} samples on the frequency axis")
    return np.fft.fft(np.fft.ifftshift(vals)) * grid.domega / _SQRT2PI


def quantize_freq_symbol(v, p):
    """f = v(w): convolution operator with kernel R(t-t') vhat(t'-t)/sqrt(2 pi).

    ``v`` is a vectorized callable of w or an array of samples on
    ``grid.omegas`` (ascending).
    """
    grid = p.grid
    vhat = _freq_symbol_lag_transform(v, grid)
    r_lag = np.fft.ifft(np.abs(np.fft.fft(p.samples)) ** 2) * grid.dt
    n = grid.n
    d = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n  # l - j
    mat = grid.dt / _SQRT2PI * r_lag[(-d) % n] * vhat[d]
    herm = hermiticity_defect(mat) <= 1e-8
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return LinearOperator(grid, mat, hermitian=herm, label="gabor[freq-symbol]")


def quantize_separable(u, v, p):
    """f = u(b) v(w): the window-kernel route on the separable transform."""
    grid = p.grid
    uvals = _as_b_samples(u, grid)
    vhat = _freq_symbol_lag_transform(v, grid) * _SQRT2PI  # undo shared prefactor
    fhat = np.outer(uvals, vhat) / _SQRT2PI
    return _kernel_operator(fhat, p, label="gabor[separable]")


def quantize_signal_self(s, p):
    """Quantize the signal itself as a time symbol: diag(|psi|^2 * s)."""
    return quantize_time_symbol(s.samples, p)


def quantize_spectrum(s, p):
    """Quantize the signal's spectrum as a frequency symbol.

    Acting on the signal itself this is (2 pi)^(-1/2) (R psi-autocorr . s) * s,
    a convolution of the signal with its autocorrelation-weighted copy.
    """
    from .fourier import dft

    return quantize_freq_symbol(dft(s).samples, p)


def quantize_reversed_spectrum(s, p):
    """Quantize the spectrum of the reversed-conjugate signal conj(s(-t)).

    That spectrum is conj(shat(w)).  The action of the resulting operator on
    ``s`` itself, conjugated and time-reversed, is the autocorrelation of the
    signal weighted by the autocorrelation of the window:

        conj((A s)(-t)) = (2 pi)^(-1/2) integral dt' R(t') s(t') conj(s(t'-t));

    for real even signals the action equals the weighted autocorrelation
    directly.
    """
    from .fourier import dft

    return quantize_freq_symbol(np.conj(dft(s).samples), p)


def quantize_gabor_coeffs(s, p):
    """Action on ``s`` of the operator quantizing the signal's own transform.

    The frequency resummation of S(b,.)^2 collapses to the circular
    self-convolution of g_b = conj(psi(.-b)) s, so

        (A_S s)(t) = sum_b psi(t-b) (g_b * g_b)(t) db.

    The full matrix is never materialized.
    """
    grid = s.grid
    rot = _lag_index_shift(grid)
    psi_lag = _lag_order(grid, p.samples)
    out = np.zeros(grid.n, dtype=np.complex128)
    for m in range(grid.n):
        win = np.roll(psi_lag, m)  # psi(t_j - b_m), b_m = t0 + m dt
        gb = np.conj(win) * s.samples
        # resummed over the frequency axis the squared transform row becomes
        # the circular self-convolution, anchored at the grid origin
        conv = np.roll(np.fft.ifft(np.fft.fft(gb) ** 2), -rot) * grid.dt
        out += win * conv
    return Signal(grid, out * grid.dt)


def gaussian_overlap_kernel(sigma):
    """|<psi_bw|psi_b'w'>|^2 for a Gaussian window: a product of Gaussians."""

    def kern(db, dw):
        return np.exp(-(db**2) / (2.0 * sigma**2)) * np.exp(-(sigma**2) * dw**2 / 2.0)

    return kern


def _overlap_kernel_numeric(p, db, dw, nb, nw):
    """|<psi_00|psi_(b,w)>|^2 sampled on centered taps (nb x nw)."""
    from .gabor import shifted_window

    g = p.grid
    boffs = db * (np.arange(nb) - nb // 2)
    woffs = dw * (np.arange(nw) - nw // 2)
    psi = p.samples
    mods = np.exp(1j * np.outer(woffs, g.times))  # (nw, n)
    out = np.empty((nb, nw))
    for i, b in enumerate(boffs):
        corr = np.conj(psi) * shifted_window(p, b)
        out[i] = np.abs(mods @ corr * g.dt) ** 2
    return out


def _open_convolve(f_vals_padded, kern_taps, weight):
    """Open 2-D convolution, 'valid' part, with the node weight folded in."""
    return fftconvolve(f_vals_padded, kern_taps, mode="valid") * weight


def semiclassical_portrait(f, p, lattice):
    """Smooth the symbol with the atom-overlap kernel (open convolution).

    Gaussian windows (or a bare width passed for ``p``) use the closed-form
    product kernel; other windows fall back to the numerically sampled
    overlap.  The kernel has unit mass under db dw/(2 pi), so f == 1 maps
    to 1.
    """
    lat = lattice
    db, dw = lat.db, lat.domega
    if isinstance(p, (int, float)):
        p = _GaussianKernelOnly(float(p))
    if p is not None and getattr(p, "sigma", None) is not None:
        sigma = p.sigma
        kern = gaussian_overlap_kernel(sigma)
        pad_b = int(np.ceil(8.0 * sigma / db)) + 1
        pad_w = int(np.ceil(8.0 / sigma / dw)) + 1
        taps = kern(
            db * (np.arange(2 * pad_b + 1) - pad_b)[:, None],
            dw * (np.arange(2 * pad_w + 1) - pad_w)[None, :],
        )
    else:
        pad_b = min(len(lat.b_values), 64)
        pad_w = min(len(lat.omega_values), 64)
        taps = _overlap_kernel_numeric(p, db, dw, 2 * pad_b + 1, 2 * pad_w + 1)
    bpad = np.concatenate(
        [
            lat.b_values[0] + db * np.arange(-pad_b, 0),
            lat.b_values,
            lat.b_values[-1] + db * np.arange(1, pad_b + 1),
        ]
    )
    wpad = np.concatenate(
        [
            lat.omega_values[0] + dw * np.arange(-pad_w, 0),
            lat.omega_values,
            lat.omega_values[-1] + dw * np.arange(1, pad_w + 1),
        ]
    )
    fv = f.sample(bpad, wpad)
    vals = _open_convolve(fv, taps, lat.node_weight)
    return SampledSymbol(lat, vals)


def classical_limit_scan(f, sigmas, lattice):
    """Interior lattice-L2 distance of the portrait from the symbol per sigma.

    No window sigma makes the distance vanish: the smoothing widths are
    sigma in time and 1/sigma in frequency, so shrinking one blows up the
    other; d(sigma) has an interior minimum and grows at both ends.
    """
    f_vals = f.sample(lattice.b_values, lattice.omega_values)
    mask = interior_mask(lattice)
    out = []
    for sigma in sigmas:
        probe_like = _GaussianKernelOnly(float(sigma))
        port = semiclassical_portrait(f, probe_like, lattice)
        diff = np.abs(port.values - f_vals) ** 2
        out.append(float(np.sqrt(np.sum(diff[mask]) * lattice.node_weight)))
    return np.asarray(out)


class _GaussianKernelOnly:
    """Stand-in probe carrying only the width tag needed by the portrait."""

    def __init__(self, sigma):
        self.sigma = sigma


def _check_self_dual(lattice, grid):
    if lattice.shape != (grid.n, grid.n):
        raise ValueError("expected the self-dual lattice of the grid")
    if abs(lattice.db * lattice.domega - 2 * np.pi / grid.n) > 1e-9:
        raise ValueError("lattice is not self-dual (db*dw != 2 pi/n)")


def symplectic_fourier(values, grid):
    """Symplectic Fourier transform on the self-dual lattice.

    Fs[f](b, w) = sum exp(-i(b w' - b' w)) f(b', w') db' dw' / (2 pi);
    involutive on the self-dual lattice.  ``values`` may be a Symbol2D or an
    (n, n) array over (times x frequencies), both axes ascending.
    """
    if isinstance(values, Symbol2D):
        values = values.sample(grid.times, grid.omegas)
    vals = np.asarray(values, dtype=np.complex128)
    if vals.shape != (grid.n, grid.n):
        raise ValueError(f"expected shape ({grid.n},{grid.n})")
    w_fft = grid.omegas_fftorder
    t0 = grid.t0
    # inner: g[m, j] = sum_l exp(-i b_j w_l) f[m, l]
    x = np.fft.ifftshift(vals, axes=1) * np.exp(-1j * w_fft * t0)[None, :]
    g = np.fft.fft(x, axis=1)  # index j = b index (natural order)
    # outer: X[j, k] = sum_m exp(+i b_m w_k) g[m, j] db dw / (2 pi)
    y = np.fft.ifft(g, axis=0) * grid.n  # fft-ordered k
    y = np.fft.fftshift(y, axes=0) * np.exp(1j * grid.omegas * t0)[:, None]
    out = y.T * (grid.dt * grid.domega / (2 * np.pi))
    return out


def _corner_mass_fraction(g_abs, frac=0.125):
    """Mass in the simultaneous outer band of both axes, as a fraction."""
    n0, n1 = g_abs.shape
    k0 = max(1, int(n0 * frac))
    k1 = max(1, int(n1 * frac))
    outer0 = np.zeros(n0, dtype=bool)
    outer0[:k0] = True
    outer0[-k0:] = True
    outer1 = np.zeros(n1, dtype=bool)
    outer1[:k1] = True
    outer1[-k1:] = True
    corner = outer0[:, None] & outer1[None, :]
    total = float(np.sum(g_abs))
    if total == 0.0:
        return 0.0
    return float(np.sum(g_abs[corner])) / total


class ApodizationWeight:
    """Weight Pi(b, w) for the symplectic-transform quantization route.

    Normalized so Pi(0, 0) = 1, which makes the unit symbol quantize to the
    identity.  Backed either by a vectorized evaluator or by samples on the
    self-dual lattice of a grid.
    """

    def __init__(self, evaluator=None, samples=None, grid=None, label=""):
        if (evaluator is None) == (samples is None):
            raise WeightError("provide exactly one of evaluator or samples")
        self.evaluator = evaluator
        self.label = label
        self._samples = None
        self._grid = grid
        if samples is not None:
            if grid is None:
                raise WeightError("samples need the grid they were taken on")
            self._samples = np.asarray(samples, dtype=np.complex128)
            if self._samples.shape != (grid.n, grid.n):
                raise WeightError(f"expected shape ({grid.n},{grid.n})")
        center = self._value_at_origin()
        if abs(center - 1.0) > 1e-8:
            raise WeightError(f"Pi(0,0) = {center} must equal 1")

    def _value_at_origin(self):
        if self.evaluator is not None:
            return complex(self.evaluator(np.zeros(1), np.zeros(1))[0])
        g = self._grid
        return complex(self._samples[g.n // 2, g.n // 2])

    def on_grid(self, grid):
        if self._samples is not None:
            if grid != self._grid:
                raise WeightError("weight was sampled on a different grid")
            return self._samples
        bg, wg = np.meshgrid(grid.times, grid.omegas, indexing="ij")
        return np.asarray(self.evaluator(bg, wg), dtype=np.complex128) + np.zeros(
            bg.shape, dtype=np.complex128
        )


def weyl_weight():
    """Pi == 1: the no-filter (Weyl-Wigner) rule."""
    return ApodizationWeight(
        evaluator=lambda b, w: np.ones_like(np.asarray(b), dtype=complex),
        label="weyl",
    )


def born_jordan_weight():
    """Pi = sin(bw)/(bw)."""

    def ev(b, w):
        return np.sinc(np.asarray(b) * np.asarray(w) / np.pi).astype(complex)

    return ApodizationWeight(evaluator=ev, label="born-jordan")


class FiducialOperator:
    """Bounded trace-class seed operator transported over phase space."""

    def __init__(self, grid, matrix, label=""):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (grid.n, grid.n):
            raise ValueError(f"expected shape ({grid.n},{grid.n})")
        self.grid = grid
        self.matrix = matrix
        self.label = label

    def trace(self):
        return complex(np.trace(self.matrix))


def rank_one_projector(p):
    """|psi><psi| as a matvec matrix (trace 1)."""
    g = p.grid
    return FiducialOperator(
        g, np.outer(p.samples, p.samples.conj()) * g.dt, label="projector"
    )


def doubled_parity(grid):
    """2 P with (P s)(t) = s(-t) (sample reversal on the centered circle).

    Discrete cross-check of the no-filter rule: the transform
    Tr(U(0,-b,-w) 2P) concentrates the continuum value 1 onto the
    index-even sublattice (value 4 there, 0 elsewhere), so every 2 x 2
    lattice cell averages to exactly 1.
    """
    n = grid.n
    perm = (-np.arange(n)) % n
    rot = _lag_index_shift(grid)
    mat = np.zeros((n, n))
    # natural index j holds time t0 + j dt; reflection about t = 0
    for j in range(n):
        src = (perm[(j + rot) % n] - rot) % n
        mat[j, src] = 2.0
    return FiducialOperator(grid, mat, label="doubled-parity")


def weyl_transform(fid):
    """Pi(b, w) = Tr(U(0,-b,-w) Q0) sampled on the self-dual lattice."""
    grid = fid.grid
    n = grid.n
    rot = _lag_index_shift(grid)
    q = fid.matrix
    out = np.empty((n, n), dtype=np.complex128)
    js = np.arange(n)
    phase0 = np.exp(-1j * grid.omegas_fftorder * grid.t0)
    for m in range(n):  # b_m = t0 + m dt; shift in samples = m - rot
        sigma = (m - rot) % n
        diag = q[(js + sigma) % n, js]
        # sum_j exp(-i w t_j) diag_j for every w, then the cocycle phase
        tr = phase0 * np.fft.fft(diag)
        b = grid.times[m]
        out[m] = np.fft.fftshift(tr) * np.exp(-0.5j * grid.omegas * b)
    return out


def probe_weight(p):
    """Apodization from the rank-one projector of a window."""
    return ApodizationWeight(
        samples=weyl_transform(rank_one_projector(p)),
        grid=p.grid,
        label=f"probe[{p.label}]",
    )


def quantize_with_apodization(f, pi, grid, tail_tol=1e-4):
    """Apodized route: resum D(b,w) conj(Fs[f]) Pi over the self-dual lattice.

    The displacement phases are resummed per circular lag with one
    double-length FFT per lag (the half-shift b/2 lands on the midpoint
    grid).  Raises TruncationError when the integrand piles up mass in the
    simultaneous far corner of the lattice, where the periodization stops
    being trustworthy.
    """
    if isinstance(f, Symbol2D):
        f_vals = f.sample(grid.times, grid.omegas)
    else:
        f_vals = np.asarray(f, dtype=np.complex128)
    fs = symplectic_fourier(f_vals, grid)
    g_vals = np.conj(fs) * pi.on_grid(grid) * (grid.dt * grid.domega / (2 * np.pi))
    corner = _corner_mass_fraction(np.abs(g_vals))
    if corner > tail_tol:
        raise TruncationError(
            f"integrand mass fraction {corner:.3e} in the lattice corner exceeds "
            f"{tail_tol:g}; the symbol decays too slowly for this lattice"
        )
    n = grid.n
    rot = _lag_index_shift(grid)
    w_fft = grid.omegas_fftorder
    mat = np.zeros((n, n), dtype=np.complex128)
    js = np.arange(n)
    for m in range(n):
        b = grid.times[m]
        # fold the cocycle e^{-i w b/2} into the coefficients, then resum
        # h[j] = sum_k coeff_k exp(i w_k t_j) with one inverse FFT
        coeff = np.fft.ifftshift(g_vals[m]) * np.exp(1j * w_fft * (grid.t0 - 0.5 * b))
        h = np.fft.ifft(coeff) * n
        sigma = (m - rot) % n
        cols = (js - sigma) % n
        mat[js, cols] += h
    herm = hermiticity_defect(mat) <= 1e-8
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return LinearOperator(grid, mat, hermitian=herm, label=f"apodized[{pi.label}]")


def portrait_convolution_form(f, pi, grid):
    """Portrait as convolution with Fs[Pi * Pi-tilde] (difference distribution).

    Pi-tilde(b, w) = Pi(-b, -w); the product is even, so the kernel is even,
    and real whenever Pi(-b,-w) = conj(Pi(b,w)).  For the rank-one window
    weight this reproduces :func:`semiclassical_portrait`.
    """
    lat = phase_lattice(grid)
    pvals = pi.on_grid(grid)
    n = grid.n
    flip = (-np.arange(n)) % n  # works on centered axes: index of -b / -w
    rot = _lag_index_shift(grid)
    idx = (flip[(np.arange(n) + rot) % n] - rot) % n
    ptilde = pvals[np.ix_(idx, flip)]
    kern_full = symplectic_fourier(pvals * ptilde, grid)
    # taper to the taps that carry mass, then open-convolve like the portrait
    mass = np.abs(kern_full)
    pad_b = min(n // 2 - 1, _support_halfwidth(mass.sum(axis=1)) + 4)
    pad_w = min(n // 2 - 1, _support_halfwidth(mass.sum(axis=0)) + 4)
    c = n // 2
    taps = kern_full[c - pad_b : c + pad_b + 1, c - pad_w : c + pad_w + 1]
    bpad = np.concatenate(
        [
            lat.b_values[0] + lat.db * np.arange(-pad_b, 0),
            lat.b_values,
            lat.b_values[-1] + lat.db * np.arange(1, pad_b + 1),
        ]
    )
    wpad = np.concatenate(
        [
            lat.omega_values[0] + lat.domega * np.arange(-pad_w, 0),
            lat.omega_values,
            lat.omega_values[-1] + lat.domega * np.arange(1, pad_w + 1),
        ]
    )
    fv = f.sample(bpad, wpad)
    vals = _open_convolve(fv, taps, lat.node_weight)
    return SampledSymbol(lat, vals)


def _support_halfwidth(profile, tol=1e-12):
    n = len(profile)
    c = n // 2
    total = float(np.max(profile))
    if total == 0.0:
        return 1
    k = c
    while k > 1 and profile[(c + k) % n] <= tol * total and profile[c - k] <= tol * total:
        k -= 1
    return min(k + 1, c - 1)


def symbol_constants(p, n_vectors=5):
    """Measured additive constants of the coordinate quantizations.

    Cst1 is the window's first moment with flipped sign (the offset of the
    quantized time coordinate); Cst2 is the scalar minimizing
    ||(A_w - Omega - c) v|| over interior Gaussian test vectors.  Both
    vanish for real even windows.
    """
    from .fourier import _gaussian_test_vectors, frequency_operator

    grid = p.grid
    cst1 = -float(np.sum(grid.times * p.intensity) * grid.dt)
    a_w = quantize_freq_symbol(lambda w: w + 0j, p).matrix
    omega = frequency_operator(grid).matrix
    num = 0.0 + 0.0j
    den = 0.0
    for v in _gaussian_test_vectors(grid, n_vectors):
        num += np.vdot(v, (a_w - omega) @ v)
        den += float(np.vdot(v, v).real)
    return cst1, complex(num / den)
