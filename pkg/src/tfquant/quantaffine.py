"""Covariant quantization over the time-scale half-plane.

The Hilbert space is L2 of the positive half-line (the positive-frequency
realization); the group acts by

    (U(b,a) phi)(x) = exp(i b x) phi(x/a) / sqrt(a),

with composition (b1,a1)(b2,a2) = (b1 + b2/a1, a1 a2), unit (0,1), inverse
(b,a)^(-1) = (-ab, 1/a), and canonical (left-invariant) measure db da.
Note the dilation runs inversely to the time-domain convention used in
tfquant.wavelet: scaling time by a scales this axis by 1/a.

A weight function on the half-plane, entering through its partial Fourier
transform over the shift variable, w_p(y, a), seeds everything:

* the fiducial operator has kernel
  M(x, x') = (2 pi)^(-1/2) (x/x') w_p(-x, x/x'),
* its group transports resolve the identity with constant
  c = sqrt(2 pi) * integral_0^inf (da/a) w_p(-a, 1),
* a symbol f(b, a) quantizes to the kernel
  A_f(x, x') = (1/c)(x/x') integral_0^inf (dq/q) w_p(-q, x/x') fhat_p(x'-x, x/q).

The wavelet-type weight built from a half-line window phi,
w_p(y, a) = sqrt(2 pi) (1/a) phi(-y) conj(phi(-y/a)), makes the fiducial
operator exactly the rank-one projector |phi><phi| and
c = 2 pi * integral |phi(q)|^2 dq/q.

Coordinates quantize to the basic operators: f = a gives multiplication by
Cst4 * x and f = b gives -i d/dx + Cst3; for real windows Cst3 = 0, and a
dilation of the weight's shift argument rescales Cst4 to 1 (calibration),
after which [A_a, A_b] = i on well-supported vectors.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AdmissibilityError, SupportError, SymbolError, TruncationError, WeightError
from .fourier import LinearOperator, hermiticity_defect
from .grid import Signal
from .wavelet import ScaleGrid

_SQRT2PI = np.sqrt(2.0 * np.pi)

__all__ = [
    "AffineGroupElement",
    "AffineWeight",
    "HalfLineGrid",
    "HalfPlaneSymbol",
    "affine_ccr_check",
    "affine_covariance_check",
    "affine_quantize",
    "affine_resolution_check",
    "affine_symbol_constants",
    "affine_uir_apply",
    "affine_uir_matrix",
    "calibrate_weight",
    "default_scale_quadrature",
    "fiducial_operator",
    "halfplane_symbol",
    "log_normal_bump",
    "resolution_constant",
    "wavelet_weight_from_probe",
]


@dataclass(frozen=True)
class HalfLineGrid:
    """Uniform samples of the open half-line, x_j = x_min + j dx, x_min >= dx/2.

    Exposes ``n``/``dt`` aliases so signals and dense operators share the
    machinery of the time-grid types.
    """

    m: int
    dx: float
    x_min: float = None

    def __post_init__(self):
        if self.m < 8:
            raise ValueError("need at least 8 samples")
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.x_min is None:
            object.__setattr__(self, "x_min", self.dx / 2)
        if self.x_min < self.dx / 2:
            raise ValueError(f"x_min={self.x_min} must be >= dx/2={self.dx / 2}")

    @property
    def n(self):
        return self.m

    @property
    def dt(self):
        return self.dx

    @property
    def x_values(self):
        return self.x_min + self.dx * np.arange(self.m)

    @property
    def x_max(self):
        return float(self.x_min + self.dx * (self.m - 1))


@dataclass(frozen=True)
class AffineGroupElement:
    """Shift-dilation pair (b, a), a > 0."""

    b: float
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("dilation must be positive")

    def compose(self, other):
        return AffineGroupElement(self.b + other.b / self.a, self.a * other.a)

    def inverse(self):
        return AffineGroupElement(-self.a * self.b, 1.0 / self.a)

    @classmethod
    def unit(cls):
        return cls(0.0, 1.0)


def log_normal_bump(grid, x0=1.0, width=0.4):
    """Unit-norm log-normal test vector, supported well inside the grid."""
    x = grid.x_values
    v = np.exp(-(np.log(x / x0) ** 2) / (2 * width**2))
    v /= np.sqrt(np.sum(np.abs(v) ** 2) * grid.dx)
    return Signal(grid, v)


def _spline(grid, samples):
    return CubicSpline(grid.x_values, samples, extrapolate=False)


def _evaluate_clamped(spline, args):
    vals = spline(args)
    return np.where(np.isnan(vals), 0.0, vals)


def affine_uir_apply(b, a, phi, check_support=True):
    """(U(b,a) phi)(x) = exp(i b x) phi(x/a)/sqrt(a), cubic off-grid."""
    g = phi.grid
    x = g.x_values
    if check_support:
        lo, hi = x[0] / a, x[-1] / a
        outside = (x < lo) | (x > hi)
        lost = float(np.sum(np.abs(phi.samples[outside]) ** 2) * g.dx)
        total = float(np.sum(np.abs(phi.samples) ** 2) * g.dx)
        if total > 0 and lost > 1e-8 * total:
            raise SupportError(
                f"dilation a={a} pushes mass {lost / total:.3e} of the signal "
                "off the grid"
            )
    sp = _spline(g, phi.samples)
    vals = _evaluate_clamped(sp, x / a)
    return Signal(g, np.exp(1j * b * x) * vals / np.sqrt(a))


def affine_uir_matrix(b, a, grid):
    """Dense matrix of U(b,a) (cubic-interpolation rows)."""
    m = grid.m
    x = grid.x_values
    cols = np.eye(m)
    mat = np.empty((m, m), dtype=np.complex128)
    for j in range(m):
        sp = _spline(grid, cols[j])
        mat[:, j] = _evaluate_clamped(sp, x / a)
    return (np.exp(1j * b * x)[:, None] / np.sqrt(a)) * mat


class AffineWeight:
    """Half-plane weight through its shift-variable partial transform.

    Provide ``partial_ft(y, a)`` directly (vectorized), or ``evaluator(b, a)``
    from which the transform is taken numerically over a shift lattice dual
    to the half-line grid.  When both are given they are cross-checked to
    1e-6 on a test lattice.  The resolution constant must come out finite
    and positive for the weight to register.
    """

    def __init__(self, partial_ft=None, evaluator=None, label="", check_grid=None):
        if partial_ft is None and evaluator is None:
            raise WeightError("provide partial_ft and/or evaluator")
        self.partial_ft = partial_ft
        self.evaluator = evaluator
        self.label = label
        if partial_ft is not None and evaluator is not None:
            grid = check_grid or HalfLineGrid(64, 0.1)
            got = self.partial_ft_samples(grid, np.array([0.5, 1.0, 2.0]))
            want = _numeric_partial_ft(evaluator, grid, np.array([0.5, 1.0, 2.0]))
            scale = max(float(np.max(np.abs(want))), 1e-30)
            if np.max(np.abs(got - want)) > 1e-6 * scale:
                raise WeightError(
                    "closed-form partial transform disagrees with the FFT of "
                    "the evaluator"
                )

    def partial_ft_samples(self, grid, a_values, y_values=None):
        """w_p(y, a) on (lags x scales); lags default to the +-m dx grid."""
        if y_values is None:
            y_values = grid.dx * np.arange(-grid.m, grid.m)
        if self.partial_ft is not None:
            yg, ag = np.meshgrid(y_values, a_values, indexing="ij")
            vals = np.asarray(self.partial_ft(yg, ag), dtype=np.complex128)
            return vals + np.zeros(yg.shape, dtype=np.complex128)
        return _numeric_partial_ft(self.evaluator, grid, a_values, y_values)


def _numeric_partial_ft(evaluator, grid, a_values, y_values=None):
    """FFT of the evaluator over the dual shift lattice, exact at grid lags."""
    if y_values is None:
        y_values = grid.dx * np.arange(-grid.m, grid.m)
    steps = np.rint(y_values / grid.dx).astype(int)
    if np.max(np.abs(y_values - steps * grid.dx)) > 1e-9 * grid.dx:
        return _numeric_partial_ft_direct(evaluator, grid, a_values, y_values)
    nb = 2 * grid.m
    db = 2 * np.pi / (nb * grid.dx)
    b = db * (np.arange(nb) - nb // 2)
    bg, ag = np.meshgrid(b, a_values, indexing="ij")
    vals = np.asarray(evaluator(bg, ag), dtype=np.complex128) + np.zeros(
        bg.shape, dtype=np.complex128
    )
    # sum_b exp(-i b y) w(b, a) db at y = step dx
    ft = np.fft.fft(np.fft.ifftshift(vals, axes=0), axis=0) * db / _SQRT2PI
    return ft[steps % nb, :]


def _numeric_partial_ft_direct(evaluator, grid, a_values, y_values):
    """Direct phase-sum transform for off-lattice lags (small batches)."""
    nb = 2 * grid.m
    db = 2 * np.pi / (nb * grid.dx)
    b = db * (np.arange(nb) - nb // 2)
    bg, ag = np.meshgrid(b, a_values, indexing="ij")
    vals = np.asarray(evaluator(bg, ag), dtype=np.complex128) + np.zeros(
        bg.shape, dtype=np.complex128
    )
    phases = np.exp(-1j * np.outer(np.asarray(y_values, dtype=float), b))
    return (phases @ vals) * db / _SQRT2PI


def wavelet_weight_from_probe(phi):
    """Weight whose fiducial operator is the rank-one projector on phi.

    w_p(y, a) = sqrt(2 pi) (1/a) phi(-y) conj(phi(-y/a)) for y < 0 (zero for
    y >= 0: the window lives on the positive half-line).
    """
    g = phi.grid
    nrm = float(np.sqrt(np.sum(np.abs(phi.samples) ** 2) * g.dx))
    if nrm == 0.0:
        raise WeightError("cannot build a weight from the zero window")
    samples = phi.samples / nrm
    sp = _spline(g, samples)

    def pft(y, a):
        y = np.asarray(y, dtype=float)
        a = np.asarray(a, dtype=float)
        va = _evaluate_clamped(sp, -y)
        vb = _evaluate_clamped(sp, -y / a)
        return _SQRT2PI / a * va * np.conj(vb)

    return AffineWeight(partial_ft=pft, label="wavelet-weight")


def fiducial_operator(w, grid):
    """M(x, x') = (2 pi)^(-1/2) (x/x') w_p(-x, x/x'), dx-weighted matrix.

    Self-adjointness is measured and stored on the operator's flag rather
    than assumed.
    """
    x = grid.x_values
    ratio = x[:, None] / x[None, :]
    if w.partial_ft is not None:
        vals = np.asarray(w.partial_ft(-x[:, None] + 0 * ratio, ratio))
    else:
        vals = _fiducial_from_numeric(w, grid)
    kern = ratio * vals / _SQRT2PI
    if not np.all(np.isfinite(kern)):
        raise WeightError("weight produced a non-finite fiducial kernel")
    mat = kern * grid.dx
    herm = hermiticity_defect(mat) <= 1e-8
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return LinearOperator(grid, mat, hermitian=herm, label="fiducial")


def _fiducial_from_numeric(w, grid):
    x = grid.x_values
    vals = np.empty((grid.m, grid.m), dtype=np.complex128)
    for i in range(grid.m):
        ratio = x[i] / x
        vals[i] = _numeric_partial_ft_direct(
            w.evaluator, grid, ratio, np.array([-x[i]])
        )[0]
    return vals


def default_scale_quadrature(octaves=6, voices=16):
    """Geometric q-grid centered on 1, ratio 2**(1/16), +-octaves."""
    q = 2.0 ** (1.0 / voices)
    k = octaves * voices
    return ScaleGrid(q ** np.arange(-k, k + 1), q)


def resolution_constant(w, scales=None, grid=None):
    """c = sqrt(2 pi) * sum_q ln(q) w_p(-q, 1) over the log grid.

    Raises when the truncated integrand still carries tail mass (relative
    > 1e-4 in the outermost octaves) or the constant fails to be positive
    real.
    """
    scales = scales or default_scale_quadrature()
    grid = grid or HalfLineGrid(64, 0.1)
    q = scales.a_values
    if w.partial_ft is not None:
        integrand = np.asarray(w.partial_ft(-q, np.ones_like(q)), dtype=complex)
    else:
        integrand = _numeric_partial_ft_direct(
            w.evaluator, grid, np.array([1.0]), -q
        )[:, 0]
    contrib = np.abs(integrand) * scales.log_weight
    total = float(np.sum(contrib))
    if total == 0.0:
        raise AdmissibilityError("resolution integrand vanishes")
    voices = int(round(1.0 / np.log2(scales.q)))
    tail = float(np.sum(contrib[:voices]) + np.sum(contrib[-voices:]))
    if tail > 1e-4 * total:
        raise AdmissibilityError(
            f"integrand tail mass {tail / total:.3e} exceeds 1e-4; widen the "
            "scale truncation"
        )
    c = complex(np.sum(integrand) * scales.log_weight * _SQRT2PI)
    if abs(c.imag) > 1e-8 * max(abs(c.real), 1e-30) or c.real <= 0:
        raise AdmissibilityError(f"resolution constant must be positive real, got {c}")
    return c.real


def _hermitian_eigenatoms(mat, tol=1e-12):
    lam, vec = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    keep = np.abs(lam) > tol * max(np.max(np.abs(lam)), 1e-300)
    return lam[keep], vec[:, keep]


def affine_resolution_check(w, b_lattice, scale_lattice, grid, c=None):
    """R = sum U(b,a) M U(b,a)^dag db da / c over the truncated lattice.

    The uniform shift lattice collapses to a fixed lag kernel
    S(x - x') = sum_b exp(i b (x - x')) db, so the node loop runs over scales
    and fiducial eigenvectors only.
    """
    if grid.m > 256:
        raise ValueError("dense resolution check is limited to m <= 256")
    b_lattice = np.asarray(b_lattice, dtype=float)
    if len(b_lattice) == 0 or len(scale_lattice.a_values) == 0:
        return LinearOperator(grid, np.zeros((grid.m, grid.m)), label="affine-resolution")
    db = b_lattice[1] - b_lattice[0] if len(b_lattice) > 1 else 1.0
    if c is None:
        c = resolution_constant(w)
    fid = fiducial_operator(w, grid)
    lam, vec = _hermitian_eigenatoms(fid.matrix / grid.dx)  # kernel values
    x = grid.x_values
    lagk = np.zeros((grid.m, grid.m), dtype=np.complex128)
    diffs = x[:, None] - x[None, :]
    for b in b_lattice:
        lagk += np.exp(1j * b * diffs)
    lagk *= db
    acc = np.zeros((grid.m, grid.m), dtype=np.complex128)
    aw = scale_lattice.a_values * scale_lattice.log_weight  # da per node
    for a, wnode in zip(scale_lattice.a_values, aw):
        for lmbd, v in zip(lam, vec.T):
            d = affine_uir_apply(0.0, a, Signal(grid, v), check_support=False)
            acc += (lmbd * wnode) * np.outer(d.samples, d.samples.conj())
    acc = acc * lagk * grid.dx / c
    return LinearOperator(grid, acc, label="affine-resolution")


class HalfPlaneSymbol:
    """Classical symbol f(b, a) on the half-plane.

    ``partial_ft_b(y, a)`` optionally supplies the closed-form transform over
    the shift variable; validated against the numeric route at construction.
    """

    def __init__(self, evaluator, partial_ft_b=None, label="", check_grid=None):
        self.evaluator = evaluator
        self.partial_ft_b = partial_ft_b
        self.label = label
        if partial_ft_b is not None:
            grid = check_grid or HalfLineGrid(64, 0.1)
            a_test = np.array([0.5, 1.0, 2.0])
            got = self._closed_samples(grid, a_test)
            want = _numeric_partial_ft(evaluator, grid, a_test)
            scale = max(float(np.max(np.abs(want))), 1e-30)
            if np.max(np.abs(got - want)) > 1e-6 * scale:
                raise SymbolError(
                    "closed-form partial transform disagrees with the FFT route"
                )

    def _closed_samples(self, grid, a_values, y_values=None):
        if y_values is None:
            y_values = grid.dx * np.arange(-grid.m, grid.m)
        yg, ag = np.meshgrid(y_values, a_values, indexing="ij")
        return np.asarray(self.partial_ft_b(yg, ag), dtype=np.complex128) + np.zeros(
            yg.shape, dtype=np.complex128
        )

    def lag_samples(self, grid, a_values):
        if self.partial_ft_b is not None:
            return self._closed_samples(grid, a_values)
        return _numeric_partial_ft(self.evaluator, grid, a_values)


def halfplane_symbol(name):
    table = {
        "one": lambda b, a: np.ones_like(np.asarray(b), dtype=complex),
        "a": lambda b, a: np.asarray(a) + 0j,
        "b": lambda b, a: np.asarray(b) + 0j,
    }
    if name not in table:
        raise KeyError(f"unknown half-plane symbol {name!r}; valid: {sorted(table)}")
    return HalfPlaneSymbol(table[name], label=name)


def affine_quantize(f, w, grid, scales=None, c=None, tail_tol=1e-4):
    """Kernel route for half-plane symbols:

    A(x, x') = (1/c)(x/x') sum_q ln(q) w_p(-q, x/x') fhat_p(x'-x, x/q).

    The shift transform of the symbol is evaluated on the lag lattice of the
    half-line grid (FFT route for evaluator-only symbols), the q-integral on
    the geometric quadrature grid.
    """
    scales = scales or default_scale_quadrature()
    if c is None:
        c = resolution_constant(w, grid=grid)
    q = scales.a_values
    x = grid.x_values
    m = grid.m
    lag_index = np.arange(-m, m)
    mat = np.empty((m, m), dtype=np.complex128)
    tail_report = 0.0
    voices = int(round(1.0 / np.log2(scales.q)))
    for i in range(m):
        a_needed = x[i] / q
        fhat = f.lag_samples(grid, a_needed)  # (2m lags, n_q)
        ratios = x[i] / x
        wvals = w.partial_ft_samples(grid, ratios, y_values=-q)  # (n_q, m)
        lag_of_col = np.arange(m) - i + m  # position of lag (x_l - x_i) in the table
        integ = fhat[lag_of_col, :] * wvals.T  # (m cols, n_q)
        if not np.all(np.isfinite(integ)):
            raise TruncationError(
                "q-integrand overflows on the quadrature grid; the symbol "
                "grows faster than the weight decays"
            )
        contrib = np.abs(integ)
        tot = np.sum(contrib)
        if tot > 0:
            tail = np.sum(contrib[:, :voices]) + np.sum(contrib[:, -voices:])
            tail_report = max(tail_report, tail / tot)
        mat[i, :] = ratios * integ.sum(axis=1) * scales.log_weight / c
    if tail_report > tail_tol:
        raise TruncationError(
            f"q-integrand tail mass {tail_report:.3e} exceeds {tail_tol:g}; "
            "widen the scale quadrature"
        )
    mat *= grid.dx
    herm = hermiticity_defect(mat) <= 1e-8
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return LinearOperator(grid, mat, hermitian=herm, label=f"affine[{f.label}]")


def affine_symbol_constants(w, grid, scales=None):
    """Measured (Cst3, Cst4) of the coordinate quantizations.

    Cst4 is the least-squares slope of diag(A_a) against x; Cst3 the scalar
    minimizing ||(A_b + i d/dx - c) v|| over interior log-normal vectors.
    """
    a_op = affine_quantize(halfplane_symbol("a"), w, grid, scales)
    diag = np.real(np.diag(a_op.matrix))
    x = grid.x_values
    cst4 = float(np.dot(diag, x) / np.dot(x, x))
    b_op = affine_quantize(halfplane_symbol("b"), w, grid, scales)
    deriv = derivative_matrix(grid)
    num = 0.0 + 0.0j
    den = 0.0
    for x0 in (0.8, 1.2):
        v = log_normal_bump(grid, x0=x0, width=0.35).samples
        num += np.vdot(v, (b_op.matrix - deriv) @ v)
        den += float(np.vdot(v, v).real)
    return complex(num / den), cst4


def calibrate_weight(w, grid, scales=None):
    """Dilate the weight's shift argument so the scale coordinate gets slope 1.

    w_p(y, a) -> lam * w_p(lam * y, a) multiplies Cst4 by lam and leaves the
    resolution constant and Cst3 untouched; lam = 1/Cst4 calibrates.
    """
    _, cst4 = affine_symbol_constants(w, grid, scales)
    lam = 1.0 / cst4
    if w.partial_ft is None:
        raise WeightError("calibration needs a closed-form partial transform")
    base = w.partial_ft

    def pft(y, a):
        return lam * base(lam * np.asarray(y), a)

    return AffineWeight(partial_ft=pft, label=f"{w.label}|calibrated")


def derivative_matrix(grid, order=8):
    """-i d/dx by centered finite differences (one-sided rows truncated)."""
    c = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    offs = np.arange(-4, 5)
    m = grid.m
    mat = np.zeros((m, m), dtype=np.complex128)
    for j in range(m):
        for co, off in zip(c, offs):
            k = j + off
            if 0 <= k < m:
                mat[j, k] = co
    del order
    return -1j * mat / grid.dx


def affine_covariance_check(f, w, b0, a0, grid, scales=None):
    """Relative deviation of U(b0,a0) A_f U^dag from A at the shifted symbol.

    The shifted symbol is f((b0,a0)^{-1}(b,a)) = f(a0 (b - b0), a / a0).
    """
    a_f = affine_quantize(f, w, grid, scales)
    shifted = HalfPlaneSymbol(
        lambda b, a: f.evaluator(a0 * (np.asarray(b) - b0), np.asarray(a) / a0),
        label=f"{f.label}|shifted",
    )
    a_s = affine_quantize(shifted, w, grid, scales)
    worst = 0.0
    inv = AffineGroupElement(b0, a0).inverse()
    for x0, width in ((0.9, 0.3), (1.4, 0.35)):
        v = log_normal_bump(grid, x0=x0, width=width)
        # U A U^dag v with U^dag = U((b0,a0)^{-1})
        mid = a_f.apply(affine_uir_apply(inv.b, inv.a, v))
        lhs = affine_uir_apply(b0, a0, mid, check_support=False)
        rhs = a_s.apply(v)
        num = np.linalg.norm(lhs.samples - rhs.samples)
        den = max(np.linalg.norm(rhs.samples), 1e-30)
        worst = max(worst, float(num / den))
    return worst


def affine_ccr_check(w, grid, scales=None):
    """||([A_a, A_b] - i) v|| / ||v|| on interior log-normal vectors."""
    a_op = affine_quantize(halfplane_symbol("a"), w, grid, scales).matrix
    b_op = affine_quantize(halfplane_symbol("b"), w, grid, scales).matrix
    comm = a_op @ b_op - b_op @ a_op
    worst = 0.0
    for x0 in (0.8, 1.2):
        v = log_normal_bump(grid, x0=x0, width=0.3).samples
        resid = comm @ v - 1j * v
        worst = max(worst, float(np.linalg.norm(resid) / np.linalg.norm(v)))
    return worst
