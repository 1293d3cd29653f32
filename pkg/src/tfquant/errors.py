"""Exception types shared across the library."""


class GridMismatchError(ValueError):
    """Two objects that must live on the same grid do not."""


class ProbeError(ValueError):
    """Probe construction failed (unresolvable width, zero norm, ...)."""


class BandLimitError(ValueError):
    """A requested frequency falls outside the representable band."""


class LatticeError(ValueError):
    """A phase-space lattice is unusable for the requested operation."""


class AdmissibilityError(ValueError):
    """A window fails the zero-mean / finite-constant admissibility test."""


class SymmetryError(ValueError):
    """The window spectrum is not modulus-even."""


class SymbolError(ValueError):
    """A supplied closed-form partial transform disagrees with the FFT."""


class TruncationError(ValueError):
    """A lattice-truncated integral carries too much tail mass."""


class WeightError(ValueError):
    """A half-plane weight function produced a non-finite kernel."""


class SupportError(ValueError):
    """A transported signal leaks off the grid by more than the tolerance."""


class ConfigError(ValueError):
    """A run configuration file is malformed or contains unknown keys."""


class InputFormatError(ValueError):
    """An input signal/symbol file violates its documented format."""
