"""File formats: signal/operator CSV, raw operator binary, PGM images.

All floats are written with 17 significant digits (%.17g) so identical
inputs produce byte-identical files; PGM is the binary 8-bit flavor (P5)
with linear scaling to the maximum, which keeps golden-file tests exact.
"""

import struct
import wave

import numpy as np

from .errors import InputFormatError
from .grid import Signal, UniformGrid

OPERATOR_MAGIC = b"TFQOP1\x00\x00"


def _fmt(x):
    return f"{x:.17g}"


# ------------------------------------------------------------------ signals


def write_signal_csv(path, signal):
    with open(path, "w") as fh:
        fh.write("t,re,im\n")
        for t, v in zip(signal.grid.times, signal.samples):
            fh.write(f"{_fmt(t)},{_fmt(v.real)},{_fmt(v.imag)}\n")


def read_signal_csv(path):
    """Parse `t,re,im` rows; the grid is inferred from the time column.

    Spacing must be uniform to 1e-9 relative and the sample count a power of
    two (the grid contract).
    """
    times = []
    vals = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,re,im":
            raise InputFormatError(f"{path}:1: expected header 't,re,im', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise InputFormatError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            try:
                t, re, im = (float(p) for p in parts)
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from None
            times.append(t)
            vals.append(re + 1j * im)
    if len(times) < 8:
        raise InputFormatError(f"{path}: need at least 8 samples, got {len(times)}")
    times = np.asarray(times)
    n = len(times)
    # snap the inferred spacing to 12 significant digits so a written grid
    # reads back as the same grid object (the raw difference carries the
    # subtraction rounding of the endpoints)
    dt = float(f"{(times[-1] - times[0]) / (n - 1):.12g}")
    if dt <= 0:
        raise InputFormatError(f"{path}: time axis is not increasing")
    expect = times[0] + dt * np.arange(n)
    if np.max(np.abs(times - expect)) > 1e-9 * dt:
        raise InputFormatError(f"{path}: time axis is not uniformly spaced")
    grid = UniformGrid(n, float(times[0]), dt)
    return Signal(grid, np.asarray(vals))


def read_wav_signal(path, downmix=False):
    """PCM 16-bit WAV; mono unless ``downmix`` averages the channels.

    Samples are scaled to [-1, 1); dt comes from the sample rate; the frame
    count is truncated to the largest power of two (the grid contract).
    """
    with wave.open(path, "rb") as fh:
        if fh.getsampwidth() != 2:
            raise InputFormatError(
                f"{path}: only PCM 16-bit supported, got sample width {fh.getsampwidth()}"
            )
        channels = fh.getnchannels()
        if channels != 1 and not downmix:
            raise InputFormatError(
                f"{path}: {channels} channels; pass --downmix to average them"
            )
        nframes = fh.getnframes()
        raw = fh.readframes(nframes)
        rate = fh.getframerate()
    data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if channels > 1:
        data = data.reshape(-1, channels).mean(axis=1)
    n = 1
    while n * 2 <= len(data):
        n *= 2
    if n < 8:
        raise InputFormatError(f"{path}: too short ({len(data)} frames)")
    data = data[:n]
    grid = UniformGrid(n, 0.0, 1.0 / rate)
    return Signal(grid, data)


def write_wav_signal(path, signal):
    """Real part as PCM 16-bit mono (test fixture helper)."""
    rate = int(round(1.0 / signal.grid.dt))
    pcm = np.clip(np.real(signal.samples), -1.0, 32767.0 / 32768.0)
    pcm = np.round(pcm * 32768.0).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(pcm.tobytes())


# ---------------------------------------------------------------- operators


def write_operator_csv(path, op, threshold=1e-14):
    """Sparse `row,col,re,im` listing of entries with modulus > threshold."""
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        mat = op.matrix
        rows, cols = np.nonzero(np.abs(mat) > threshold)
        for r, c in zip(rows, cols):
            v = mat[r, c]
            fh.write(f"{r},{c},{_fmt(v.real)},{_fmt(v.imag)}\n")


def write_operator_binary(path, op):
    """16-byte header (magic, uint64 n) then 2 n^2 little-endian float64.

    The payload interleaves real and imaginary parts row-major (the memory
    layout of a little-endian complex128 matrix).
    """
    mat = np.ascontiguousarray(op.matrix, dtype="<c16")
    n = mat.shape[0]
    with open(path, "wb") as fh:
        fh.write(OPERATOR_MAGIC)
        fh.write(struct.pack("<Q", n))
        fh.write(mat.tobytes())


def read_operator_binary(path):
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != OPERATOR_MAGIC:
            raise InputFormatError(f"{path}: bad magic {magic!r}")
        (n,) = struct.unpack("<Q", fh.read(8))
        payload = fh.read(16 * n * n)
    if len(payload) != 16 * n * n:
        raise InputFormatError(f"{path}: truncated payload")
    return np.frombuffer(payload, dtype="<c16").reshape(n, n).copy()


# ------------------------------------------------------------------- images


def write_pgm(path, image):
    """8-bit binary PGM; values scaled linearly so the maximum maps to 255."""
    img = np.asarray(image, dtype=float)
    peak = float(np.max(img)) if img.size else 0.0
    if peak <= 0:
        scaled = np.zeros_like(img, dtype=np.uint8)
    else:
        scaled = np.clip(np.rint(img / peak * 255.0), 0, 255).astype(np.uint8)
    h, w = scaled.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(scaled.tobytes())


# ------------------------------------------------- phase-space coefficients


def write_spectrogram_csv(path, coeffs):
    """`b,omega,re,im,abs2` rows over the time-frequency lattice."""
    lat = coeffs.lattice
    with open(path, "w") as fh:
        fh.write("b,omega,re,im,abs2\n")
        for i, b in enumerate(lat.b_values):
            for k, w in enumerate(lat.omega_values):
                v = coeffs.values[i, k]
                fh.write(
                    f"{_fmt(b)},{_fmt(w)},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v) ** 2)}\n"
                )


def write_spectrogram_pgm(path, coeffs):
    """|S|^2 image, frequency rows descending, time columns ascending."""
    power = np.abs(coeffs.values) ** 2
    write_pgm(path, power.T[::-1, :])


def write_scalogram_csv(path, coeffs):
    """`b,a,re,im,abs2` rows over the time-scale lattice."""
    with open(path, "w") as fh:
        fh.write("b,a,re,im,abs2\n")
        for i, b in enumerate(coeffs.b_values):
            for j, a in enumerate(coeffs.scale_grid.a_values):
                v = coeffs.values[i, j]
                fh.write(
                    f"{_fmt(b)},{_fmt(a)},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v) ** 2)}\n"
                )


def write_scalogram_pgm(path, coeffs):
    """|S|^2 image, scale rows descending, time columns ascending."""
    power = np.abs(coeffs.values) ** 2
    write_pgm(path, power.T[::-1, :])


# ------------------------------------------------------------------ symbols


def write_symbol_csv(path, lattice, values):
    """`b,omega,re,im` rows; the portrait emitter shares this format."""
    with open(path, "w") as fh:
        fh.write("b,omega,re,im\n")
        for i, b in enumerate(lattice.b_values):
            for k, w in enumerate(lattice.omega_values):
                v = values[i, k]
                fh.write(f"{_fmt(b)},{_fmt(w)},{_fmt(v.real)},{_fmt(v.imag)}\n")


def read_symbol_csv(path, grid):
    """Symbol samples on the full self-dual lattice of ``grid``.

    The file must contain every (b, omega) node exactly once.
    """
    n = grid.n
    values = np.full((n, n), np.nan, dtype=np.complex128)
    seen = 0
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "b,omega,re,im":
            raise InputFormatError(
                f"{path}:1: expected header 'b,omega,re,im', got {header!r}"
            )
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise InputFormatError(f"{path}:{lineno}: expected 4 fields")
            try:
                b, w, re, im = (float(p) for p in parts)
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from None
            i = int(round((b - grid.t0) / grid.dt))
            k = int(round((w - grid.omegas[0]) / grid.domega))
            if not (0 <= i < n and 0 <= k < n):
                raise InputFormatError(f"{path}:{lineno}: node off the lattice")
            if (
                abs(grid.times[i] - b) > 1e-9 * grid.dt
                or abs(grid.omegas[k] - w) > 1e-9 * grid.domega
            ):
                raise InputFormatError(f"{path}:{lineno}: node off the lattice")
            values[i, k] = re + 1j * im
            seen += 1
    if seen != n * n or np.any(np.isnan(values)):
        raise InputFormatError(
            f"{path}: expected all {n * n} lattice nodes, got {seen}"
        )
    return values


def read_affine_weight_csv(path):
    """Weight transform samples `y,a,re,im` on a rectangular (y, a) mesh.

    Returns a vectorized interpolating evaluator (linear in y and ln a, zero
    outside the sampled rectangle).
    """
    from scipy.interpolate import RegularGridInterpolator

    ys, as_, vals = [], [], {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "y,a,re,im":
            raise InputFormatError(f"{path}:1: expected header 'y,a,re,im', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise InputFormatError(f"{path}:{lineno}: expected 4 fields")
            try:
                y, a, re, im = (float(p) for p in parts)
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from None
            if a <= 0:
                raise InputFormatError(f"{path}:{lineno}: scale must be positive")
            ys.append(y)
            as_.append(a)
            vals[(y, a)] = re + 1j * im
    yu = np.unique(ys)
    au = np.unique(as_)
    if len(yu) * len(au) != len(vals):
        raise InputFormatError(f"{path}: samples do not form a rectangular (y, a) mesh")
    table = np.empty((len(yu), len(au)), dtype=np.complex128)
    for i, y in enumerate(yu):
        for j, a in enumerate(au):
            if (y, a) not in vals:
                raise InputFormatError(f"{path}: missing node (y={y}, a={a})")
            table[i, j] = vals[(y, a)]
    interp = RegularGridInterpolator(
        (yu, np.log(au)), table, bounds_error=False, fill_value=0.0
    )

    def pft(y, a):
        y = np.asarray(y, dtype=float)
        a = np.asarray(a, dtype=float)
        y, a = np.broadcast_arrays(y, a)
        pts = np.stack([y.ravel(), np.log(a.ravel())], axis=-1)
        return interp(pts).reshape(y.shape)

    return pft
