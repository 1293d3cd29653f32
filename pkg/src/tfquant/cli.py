"""Command-line front end.

Subcommands: ``analyze`` (transforms), ``quantize`` (symbol -> operator),
``portrait`` (semi-classical smoothing scans), ``verify`` (the invariant
suite as a machine-readable report).

Exit codes: 0 success, 2 usage error, 3 input-format error, 4 verification
failure.
"""

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io as tfio
from .errors import (
    AdmissibilityError,
    BandLimitError,
    ConfigError,
    GridMismatchError,
    InputFormatError,
    LatticeError,
    ProbeError,
    SupportError,
    SymbolError,
    SymmetryError,
    TruncationError,
    WeightError,
)
from .fourier import (
    dft,
    frequency_operator,
    hermiticity_defect,
    idft,
    time_operator,
    uncertainty_product,
    weyl_relation_check,
)
from .gabor import (
    covariance_check,
    default_lattice,
    gabor_reconstruct,
    gabor_transform,
    resolution_of_identity_matrix,
)
from .grid import Signal, UniformGrid, energy, make_gaussian_probe, norm
from .quantaffine import (
    HalfLineGrid,
    affine_ccr_check,
    affine_covariance_check,
    affine_quantize,
    affine_resolution_check,
    affine_symbol_constants,
    calibrate_weight,
    derivative_matrix,
    halfplane_symbol,
    log_normal_bump,
    wavelet_weight_from_probe,
)
from .quantwh import (
    born_jordan_weight,
    builtin_symbol,
    classical_limit_scan,
    interior_mask,
    probe_weight,
    quantize_freq_symbol,
    quantize_gabor,
    quantize_gabor_sampled,
    quantize_time_symbol,
    quantize_with_apodization,
    semiclassical_portrait,
    symplectic_fourier,
    weyl_weight,
)
from .wavelet import ScaleGrid, cwt, icwt, mexican_hat, morlet

_CONFIG_KEYS = {
    "grid.n",
    "grid.t0",
    "grid.dt",
    "halfline.m",
    "halfline.dx",
    "probe",
    "transform",
    "wavelet",
    "octaves",
    "voices",
    "symbol",
    "route",
    "sigmas",
    "input",
    "downmix",
    "apply_to",
    "seed",
    "out",
    "only",
}

WH_ROUTES = ("gabor", "weyl", "born-jordan", "apodized:<probe>", "affine:<weight>")


@dataclass
class RunConfig:
    """Flat, fully serializable run description."""

    grid_n: int = 512
    grid_t0: float = None
    grid_dt: float = 0.05
    halfline_m: int = 256
    halfline_dx: float = 0.04
    probe: str = "gaussian:1"
    transform: str = "gabor"
    wavelet: str = "mexican-hat"
    octaves: float = 4.0
    voices: int = 8
    symbol: str = "one"
    route: str = "gabor"
    sigmas: str = "0.25,1,4"
    input: str = None
    downmix: bool = False
    apply_to: str = None
    seed: int = 0
    out: str = "."
    only: str = None
    tolerances: dict = field(default_factory=dict)

    _FIELD_BY_KEY = {
        "grid.n": ("grid_n", int),
        "grid.t0": ("grid_t0", float),
        "grid.dt": ("grid_dt", float),
        "halfline.m": ("halfline_m", int),
        "halfline.dx": ("halfline_dx", float),
        "probe": ("probe", str),
        "transform": ("transform", str),
        "wavelet": ("wavelet", str),
        "octaves": ("octaves", float),
        "voices": ("voices", int),
        "symbol": ("symbol", str),
        "route": ("route", str),
        "sigmas": ("sigmas", str),
        "input": ("input", str),
        "downmix": ("downmix", lambda s: s.lower() in ("1", "true", "yes")),
        "apply_to": ("apply_to", str),
        "seed": ("seed", int),
        "out": ("out", str),
        "only": ("only", str),
    }

    @classmethod
    def from_file(cls, path):
        cfg = cls()
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if key.startswith("tol."):
                    cfg.tolerances[key[4:]] = float(value)
                    continue
                if key not in cls._FIELD_BY_KEY:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                name, conv = cls._FIELD_BY_KEY[key]
                try:
                    setattr(cfg, name, conv(value))
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from None
        return cfg

    def to_file(self, path):
        with open(path, "w") as fh:
            for key in sorted(self._FIELD_BY_KEY):
                name, _ = self._FIELD_BY_KEY[key]
                value = getattr(self, name)
                if value is None:
                    continue
                if isinstance(value, bool):
                    value = "true" if value else "false"
                fh.write(f"{key}={value}\n")
            for name in sorted(self.tolerances):
                fh.write(f"tol.{name}={self.tolerances[name]:.17g}\n")

    def make_grid(self):
        if self.grid_t0 is None:
            return UniformGrid.centered(self.grid_n, self.grid_dt)
        return UniformGrid(self.grid_n, self.grid_t0, self.grid_dt)

    def make_halfline(self):
        return HalfLineGrid(self.halfline_m, self.halfline_dx)


def parse_probe_spec(spec, grid):
    kind, _, param = spec.partition(":")
    if kind != "gaussian":
        raise ConfigError(f"unknown probe {spec!r}; valid: gaussian:<sigma>")
    try:
        sigma = float(param)
    except ValueError:
        raise ConfigError(f"bad probe width in {spec!r}") from None
    return make_gaussian_probe(grid, sigma)


class VerificationReport:
    """Rows of (check, measured value, tolerance, pass); overall = all rows."""

    def __init__(self):
        self.rows = []

    def add(self, name, value, tolerance):
        self.rows.append((name, float(value), float(tolerance), float(value) <= float(tolerance)))

    @property
    def passed(self):
        return all(ok for _, _, _, ok in self.rows)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("check,value,tolerance,status\n")
            for name, value, tol, ok in self.rows:
                fh.write(f"{name},{value:.17g},{tol:.17g},{'pass' if ok else 'fail'}\n")
            fh.write(f"overall,,,{'pass' if self.passed else 'fail'}\n")

    def summary(self):
        lines = []
        for name, value, tol, ok in self.rows:
            mark = "ok  " if ok else "FAIL"
            lines.append(f"[{mark}] {name:<34s} {value:.3e} <= {tol:.3e}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'} ({len(self.rows)} checks)")
        return "\n".join(lines)


def _read_signal(path, downmix=False):
    if path.lower().endswith(".wav"):
        return tfio.read_wav_signal(path, downmix=downmix)
    return tfio.read_signal_csv(path)


def cmd_analyze(cfg, outdir):
    sig = _read_signal(cfg.input, cfg.downmix)
    grid = sig.grid
    if cfg.transform == "gabor":
        probe = parse_probe_spec(cfg.probe, grid)
        lat = default_lattice(grid, probe.sigma)
        coeffs = gabor_transform(sig, probe, lat)
        residual = abs(coeffs.energy() / energy(sig) - 1.0)
        tfio.write_spectrogram_csv(outdir / "spectrogram.csv", coeffs)
        tfio.write_spectrogram_pgm(outdir / "spectrogram.pgm", coeffs)
        print(f"gabor energy-identity residual: {residual:.6e}")
    elif cfg.transform == "cwt":
        if cfg.wavelet == "mexican-hat":
            wav = mexican_hat(grid)
        elif cfg.wavelet == "morlet":
            wav = morlet(grid)
        else:
            raise ConfigError(
                f"unknown wavelet {cfg.wavelet!r}; valid: mexican-hat, morlet"
            )
        a_min = 4.0 * grid.dt / wav.time_width * 1.05
        feasible = float(np.log2(grid.span / 8.0 / (a_min * wav.time_width)))
        octaves = cfg.octaves
        if octaves > feasible:
            octaves = feasible
            print(f"note: clamping scale range to {octaves:.2f} octaves (grid span)")
        scales = ScaleGrid.geometric(a_min, octaves, voices=cfg.voices)
        coeffs = cwt(sig, wav, grid.times, scales)
        residual = abs(coeffs.energy() / energy(sig) - 1.0)
        tfio.write_scalogram_csv(outdir / "scalogram.csv", coeffs)
        tfio.write_scalogram_pgm(outdir / "scalogram.pgm", coeffs)
        print(f"cwt energy-identity residual: {residual:.6e}")
    else:
        raise ConfigError(f"unknown transform {cfg.transform!r}; valid: gabor, cwt")
    return 0


def _wh_symbol(cfg, grid):
    if cfg.symbol.startswith("csv:"):
        return None, tfio.read_symbol_csv(cfg.symbol[4:], grid)
    try:
        return builtin_symbol(cfg.symbol), None
    except KeyError as exc:
        raise ConfigError(str(exc)) from None


def cmd_quantize(cfg, outdir):
    route = cfg.route
    if route == "gabor" or route.startswith("apodized") or route in ("weyl", "born-jordan"):
        grid = cfg.make_grid()
        probe = parse_probe_spec(cfg.probe, grid)
        f, samples = _wh_symbol(cfg, grid)
        if route == "gabor":
            op = (
                quantize_gabor(f, probe)
                if f is not None
                else quantize_gabor_sampled(samples, probe)
            )
        else:
            if route == "weyl":
                weight = weyl_weight()
            elif route == "born-jordan":
                weight = born_jordan_weight()
            else:
                _, _, pspec = route.partition(":")
                weight = probe_weight(parse_probe_spec(pspec, grid))
            op = quantize_with_apodization(
                f if f is not None else samples, weight, grid
            )
    elif route.startswith("affine:"):
        hgrid = cfg.make_halfline()
        _, _, wspec = route.partition(":")
        weight = _affine_weight(wspec, hgrid)
        try:
            f = halfplane_symbol(cfg.symbol)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        op = affine_quantize(f, weight, hgrid)
    else:
        raise ConfigError(f"unknown route {route!r}; valid: {', '.join(WH_ROUTES)}")

    tfio.write_operator_csv(outdir / "operator.csv", op)
    tfio.write_operator_binary(outdir / "operator.bin", op)
    defect = hermiticity_defect(op.matrix)
    print(f"operator {op.label}: hermiticity defect {defect:.6e}")
    if cfg.apply_to:
        sig = _read_signal(cfg.apply_to, cfg.downmix)
        out = op.apply(sig)
        tfio.write_signal_csv(outdir / "applied.csv", out)
    return 0


def _affine_weight(spec, hgrid):
    kind, _, rest = spec.partition(":")
    if kind == "wavelet":
        if rest in ("bump", ""):
            phi = log_normal_bump(hgrid)
            return wavelet_weight_from_probe(phi)
        raise ConfigError(f"unknown wavelet weight window {rest!r}; valid: bump")
    if kind == "custom":
        from .quantaffine import AffineWeight

        return AffineWeight(partial_ft=tfio.read_affine_weight_csv(rest), label=f"custom:{rest}")
    raise ConfigError(
        f"unknown affine weight {spec!r}; valid: wavelet:bump, custom:<csv-path>"
    )


def cmd_portrait(cfg, outdir):
    grid = cfg.make_grid()
    try:
        f = builtin_symbol(cfg.symbol)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    lat = default_lattice(grid, 1.0)
    try:
        sigmas = [float(s) for s in cfg.sigmas.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad sigma list {cfg.sigmas!r}") from None
    if not sigmas:
        raise ConfigError("empty sigma list")
    for s in sigmas:
        port = semiclassical_portrait(f, s, lat)
        tag = f"{s:g}".replace(".", "p")
        tfio.write_symbol_csv(outdir / f"portrait_sigma{tag}.csv", lat, port.values)
        tfio.write_pgm(outdir / f"portrait_sigma{tag}.pgm", np.abs(port.values).T[::-1, :])
    d = classical_limit_scan(f, sigmas, lat)
    with open(outdir / "dtable.csv", "w") as fh:
        fh.write("sigma,distance\n")
        for s, dv in zip(sigmas, d):
            fh.write(f"{s:.17g},{dv:.17g}\n")
    print("sigma  d(sigma)")
    for s, dv in zip(sigmas, d):
        print(f"{s:<6g} {dv:.6e}")
    return 0


def _verify_checks(cfg, rng):
    """Yield (name, measured, default tolerance) for the invariant suite."""
    grid = UniformGrid.centered(512, 0.05)
    probe = make_gaussian_probe(grid, 1.0)

    def band_limited(seed_sig):
        spec = np.zeros(grid.n, dtype=complex)
        keep = np.abs(grid.omegas) < 0.25 * grid.omega_max
        spec[keep] = seed_sig.standard_normal(keep.sum()) + 1j * seed_sig.standard_normal(
            keep.sum()
        )
        s = idft(type(dft(Signal(grid, np.zeros(grid.n))))(grid, spec))
        env = np.exp(-(grid.times**2) / (2 * (grid.span / 12) ** 2))
        return Signal(grid, s.samples * env)

    # Plancherel
    worst = 0.0
    for _ in range(20):
        s = band_limited(rng)
        worst = max(worst, abs(dft(s).energy() / energy(s) - 1.0))
    yield "plancherel", worst, 1e-10

    # Gabor energy + round trip
    gauss = Signal(
        grid,
        np.pi ** (-0.25) * np.exp(-((grid.times - 1.0) ** 2) / 2) * np.exp(0.8j * grid.times),
    )
    chirp = Signal(
        grid,
        np.pi ** (-0.25) / np.sqrt(2) * np.exp(-(grid.times**2) / 8) * np.exp(1j * grid.times**2 / 4),
    )
    lat = default_lattice(grid, 1.0)
    cg = gabor_transform(gauss, probe, lat)
    cc = gabor_transform(chirp, probe, lat)
    yield "gabor-energy-gaussian", abs(cg.energy() / energy(gauss) - 1), 1e-6
    yield "gabor-energy-chirp", abs(cc.energy() / energy(chirp) - 1), 1e-6
    rg = gabor_reconstruct(cg, probe)
    yield "gabor-roundtrip-gaussian", norm(Signal(grid, rg.samples - gauss.samples)) / norm(gauss), 1e-6
    rc = gabor_reconstruct(cc, probe)
    yield "gabor-roundtrip-chirp", norm(Signal(grid, rc.samples - chirp.samples)) / norm(chirp), 1e-4

    # Gabor resolution of identity at n = 256
    g256 = UniformGrid.centered(256, 0.05)
    p256 = make_gaussian_probe(g256, 1.0)
    r = resolution_of_identity_matrix(p256, default_lattice(g256, 1.0))
    yield "gabor-resolution", np.linalg.norm(r.matrix - np.eye(256)) / np.sqrt(256), 1e-6

    # covariance
    dev = max(
        covariance_check(gauss, probe, 4 * lat.db, 0.0, lat),
        covariance_check(gauss, probe, 0.0, 4 * lat.domega, lat),
        covariance_check(gauss, probe, 8 * lat.db, -4 * lat.domega, lat),
    )
    yield "gabor-covariance", dev, 1e-8

    # CCR and uncertainty
    t_op = time_operator(grid).matrix
    w_op = frequency_operator(grid).matrix
    resid_op = t_op @ w_op - w_op @ t_op - 1j * np.eye(grid.n)
    worst = 0.0
    for sig in (0.5, 1.0, 2.0):
        ps = make_gaussian_probe(grid, sig)
        worst = max(worst, np.linalg.norm(resid_op @ ps.samples) / np.linalg.norm(ps.samples))
    yield "ccr-gaussian", worst, 1e-6
    worst = max(abs(uncertainty_product(make_gaussian_probe(grid, s).base) - 0.5) for s in (0.5, 1.0, 2.0))
    yield "uncertainty-gaussian", worst, 1e-6
    short = min(uncertainty_product(band_limited(rng)) for _ in range(10))
    yield "uncertainty-lower-bound", max(0.0, 0.5 - short), 1e-6
    yield "weyl-relations", weyl_relation_check(0.5, 0.5, grid), 1e-6

    # coordinate quantization
    vecs = [
        np.exp(-((grid.times - c) ** 2) / 2 + 1j * w0 * grid.times)
        for c, w0 in ((-1.5, 2.0), (0.0, 0.0), (1.5, -3.0))
    ]
    a_b = quantize_gabor(builtin_symbol("b"), probe).matrix
    a_w = quantize_gabor(builtin_symbol("omega"), probe).matrix
    yield "quantize-time-coordinate", max(
        np.linalg.norm((a_b - t_op) @ v) / np.linalg.norm(v) for v in vecs
    ), 1e-6
    yield "quantize-freq-coordinate", max(
        np.linalg.norm((a_w - w_op) @ v) / np.linalg.norm(v) for v in vecs
    ), 1e-6

    # closed forms
    one_op = quantize_time_symbol(lambda b: np.ones_like(b, dtype=complex), probe)
    yield "unit-time-symbol", np.max(np.abs(one_op.matrix - np.eye(grid.n))), 1e-12
    sq = quantize_time_symbol(lambda b: b**2 + 0j, probe)
    interior = np.abs(grid.times) < grid.span / 4
    yield "time-symbol-square", np.max(
        np.abs(np.real(np.diag(sq.matrix))[interior] - (grid.times**2 + 0.5)[interior])
    ), 1e-8
    acr = probe.autocorr.samples
    yield "autocorrelation-gaussian", np.max(np.abs(acr - np.exp(-(grid.lags**2) / 4))), 1e-8
    a_w2 = quantize_freq_symbol(lambda w: w + 0j, probe).matrix
    yield "freq-vs-kernel-route", np.max(np.abs(a_w2 - a_w)), 1e-8

    # portraits
    mask = interior_mask(lat)
    bg, wg = np.meshgrid(lat.b_values, lat.omega_values, indexing="ij")
    pb2 = semiclassical_portrait(builtin_symbol("b2"), probe, lat)
    yield "portrait-b2", np.max(np.abs((pb2.values - (bg**2 + 1.0))[mask])), 1e-6
    pw2 = semiclassical_portrait(builtin_symbol("omega2"), probe, lat)
    yield "portrait-omega2", np.max(np.abs((pw2.values - (wg**2 + 1.0))[mask])), 1e-6
    d = classical_limit_scan(builtin_symbol("harmonic"), [0.25, 1.0, 4.0], lat)
    yield "no-classical-limit", 0.0 if (d[0] > d[1] and d[2] > d[1]) else 1.0, 0.5

    # route equivalence and apodized routes
    pw = probe_weight(probe)
    worst = 0.0
    for name in ("one", "b", "omega", "b2", "omega2", "bw"):
        aker = quantize_gabor(builtin_symbol(name), probe).matrix
        aapo = quantize_with_apodization(builtin_symbol(name), pw, grid).matrix
        worst = max(worst, np.max(np.abs(aker - aapo)))
    yield "route-equivalence", worst, 1e-6
    wl = weyl_weight()
    tb = quantize_with_apodization(builtin_symbol("b"), wl, grid).matrix
    yield "weyl-reproduces-T", max(
        np.linalg.norm((tb - t_op) @ v) / np.linalg.norm(v) for v in vecs
    ), 1e-6
    tw = quantize_with_apodization(builtin_symbol("omega"), wl, grid).matrix
    yield "weyl-reproduces-Omega", max(
        np.linalg.norm((tw - w_op) @ v) / np.linalg.norm(v) for v in vecs
    ), 1e-6
    bj = born_jordan_weight()
    yield "born-jordan-hermitian", hermiticity_defect(
        quantize_with_apodization(builtin_symbol("harmonic"), bj, grid).matrix
    ), 1e-8
    rng_f = np.random.default_rng(cfg.seed + 1)
    fvals = rng_f.standard_normal((grid.n, grid.n)) + 1j * rng_f.standard_normal((grid.n, grid.n))
    invol = symplectic_fourier(symplectic_fourier(fvals, grid), grid)
    yield "symplectic-involution", np.max(np.abs(invol - fvals)) / np.max(np.abs(fvals)), 1e-8

    # CWT block
    gw = UniformGrid.centered(2048, 0.04)
    wav = mexican_hat(gw)
    spec = np.exp(-((gw.omegas - 2.0) ** 2) / (2 * 0.3**2))
    from .fourier import Spectrum

    s0 = idft(Spectrum(gw, spec)).samples
    sw = Signal(gw, s0 * np.exp(-(gw.times**2) / (2 * (gw.span / 14) ** 2)))
    scales = ScaleGrid.geometric(0.15, 5, voices=8)
    cwv = cwt(sw, wav, gw.times, scales)
    yield "cwt-energy", abs(cwv.energy() / energy(sw) - 1), 2e-2
    rw = icwt(cwv, wav)
    yield "cwt-roundtrip", norm(Signal(gw, rw.samples - sw.samples)) / norm(sw), 1e-2
    from .wavelet import admissibility_constant

    c1 = admissibility_constant(Signal(gw, wav.base.samples))
    c3 = admissibility_constant(Signal(gw, 3.0 * wav.base.samples))
    yield "cwt-homogeneity", abs(c3 / c1 - 9.0), 1e-10

    # affine block
    hgrid = HalfLineGrid(256, 0.04)
    phi = log_normal_bump(hgrid)
    weight = wavelet_weight_from_probe(phi)
    v = log_normal_bump(hgrid, x0=1.2, width=0.3)
    b_lat = np.arange(-30.0, 30.0 + 0.125, 0.25)
    scl = ScaleGrid.geometric(0.25, 4, voices=8)
    r = affine_resolution_check(weight, b_lat, scl, hgrid)
    yield "affine-resolution", np.linalg.norm(r.matrix @ v.samples - v.samples) / np.linalg.norm(v.samples), 2e-2
    cal = calibrate_weight(weight, hgrid)
    _, cst4 = affine_symbol_constants(cal, hgrid)
    yield "affine-scale-coordinate", abs(cst4 - 1.0), 1e-3
    ab = affine_quantize(halfplane_symbol("b"), cal, hgrid).matrix
    dmat = derivative_matrix(hgrid)
    yield "affine-shift-coordinate", max(
        np.linalg.norm((ab - dmat) @ log_normal_bump(hgrid, x0=x0, width=0.3).samples)
        / np.linalg.norm(log_normal_bump(hgrid, x0=x0, width=0.3).samples)
        for x0 in (0.9, 1.3)
    ), 1e-3
    yield "affine-ccr", affine_ccr_check(cal, hgrid), 1e-2
    yield "affine-covariance-one", affine_covariance_check(
        halfplane_symbol("one"), weight, 0.4, 1.5, hgrid
    ), 2e-2
    yield "affine-covariance-a", affine_covariance_check(
        halfplane_symbol("a"), weight, 0.0, 2.0, hgrid
    ), 1e-2


def cmd_verify(cfg, outdir):
    rng = np.random.default_rng(cfg.seed)
    report = VerificationReport()
    for name, value, tol in _verify_checks(cfg, rng):
        if cfg.only and cfg.only not in name:
            continue
        tol = cfg.tolerances.get(name, tol)
        report.add(name, value, tol)
    report.write_csv(outdir / "report.csv")
    print(report.summary())
    return 0 if report.passed else 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tfquant",
        description="Signal-analysis transforms and phase-space quantization",
    )
    parser.add_argument("--config", help="key=value run configuration file")
    parser.add_argument("--out", help="output directory (default: cwd)")
    parser.add_argument("--seed", type=int, help="seed for randomized checks")
    parser.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a verification tolerance (repeatable)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="transform a signal file")
    p_an.add_argument("--input", help="signal CSV or 16-bit mono WAV")
    p_an.add_argument("--transform", choices=["gabor", "cwt"])
    p_an.add_argument("--probe", help="analysis window, e.g. gaussian:1")
    p_an.add_argument("--wavelet", help="mexican-hat or morlet")
    p_an.add_argument("--octaves", type=float)
    p_an.add_argument("--voices", type=int)
    p_an.add_argument("--downmix", action="store_true", default=None)

    p_q = sub.add_parser("quantize", help="build the operator of a symbol")
    p_q.add_argument("--symbol", help="named symbol or csv:<path>")
    p_q.add_argument("--route", help="gabor | weyl | born-jordan | apodized:<probe> | affine:<weight>")
    p_q.add_argument("--probe", help="analysis window, e.g. gaussian:1")
    p_q.add_argument("--apply-to", dest="apply_to", help="signal file to apply the operator to")
    p_q.add_argument("--grid-n", dest="grid_n", type=int)
    p_q.add_argument("--grid-dt", dest="grid_dt", type=float)

    p_p = sub.add_parser("portrait", help="semi-classical portraits and limit scan")
    p_p.add_argument("--symbol")
    p_p.add_argument("--sigmas", help="comma-separated window widths")

    p_v = sub.add_parser("verify", help="run the invariant suite")
    p_v.add_argument("--only", help="restrict to checks whose name contains this")

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        for spec in args.tol:
            name, _, value = spec.partition("=")
            if not value:
                raise ConfigError(f"bad --tol {spec!r}; expected NAME=VALUE")
            cfg.tolerances[name] = float(value)
        for name in (
            "input",
            "transform",
            "probe",
            "wavelet",
            "octaves",
            "voices",
            "symbol",
            "route",
            "sigmas",
            "apply_to",
            "only",
            "grid_n",
            "grid_dt",
            "downmix",
        ):
            val = getattr(args, name, None)
            if val is not None:
                setattr(cfg, name, val)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out

        from pathlib import Path

        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)

        if args.command == "analyze":
            if not cfg.input:
                raise ConfigError("analyze needs --input (or input= in the config)")
            return cmd_analyze(cfg, outdir)
        if args.command == "quantize":
            return cmd_quantize(cfg, outdir)
        if args.command == "portrait":
            return cmd_portrait(cfg, outdir)
        if args.command == "verify":
            return cmd_verify(cfg, outdir)
        raise ConfigError(f"unknown command {args.command!r}")
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (
        ConfigError,
        AdmissibilityError,
        BandLimitError,
        GridMismatchError,
        LatticeError,
        ProbeError,
        SupportError,
        SymbolError,
        SymmetryError,
        TruncationError,
        WeightError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
