"""tfquant: signal analysis transforms and covariant integral quantization.

Layers:

* grid / fourier -- uniform grids, signals, the unitary DFT, the time and
  frequency operators;
* gabor / wavelet -- time-frequency and time-scale transforms with their
  resolution-of-identity checks;
* quantwh / quantaffine -- operators built from phase-space symbols by
  Weyl-Heisenberg (window-kernel and apodized routes) and affine covariant
  quantization;
* io / cli -- file formats and the command-line front end.
"""

from .fourier import (
    LinearOperator,
    Spectrum,
    commutator,
    dft,
    frequency_operator,
    idft,
    time_operator,
    uncertainty_product,
    weyl_relation_check,
)
from .gabor import (
    GaborCoeffs,
    TFLattice,
    WHGroupElement,
    covariance_check,
    default_lattice,
    gabor_atom,
    gabor_reconstruct,
    gabor_transform,
    resolution_of_identity_matrix,
    wh_displacement,
)
from .grid import (
    Probe,
    Signal,
    UniformGrid,
    autocorrelation,
    energy,
    inner_product,
    make_gaussian_probe,
    norm,
)
from .quantaffine import (
    AffineGroupElement,
    AffineWeight,
    HalfLineGrid,
    HalfPlaneSymbol,
    affine_quantize,
    affine_resolution_check,
    affine_uir_apply,
    calibrate_weight,
    fiducial_operator,
    halfplane_symbol,
    resolution_constant,
    wavelet_weight_from_probe,
)
from .quantwh import (
    ApodizationWeight,
    FiducialOperator,
    Symbol2D,
    born_jordan_weight,
    builtin_symbol,
    classical_limit_scan,
    probe_weight,
    quantize_freq_symbol,
    quantize_gabor,
    quantize_separable,
    quantize_time_symbol,
    quantize_with_apodization,
    semiclassical_portrait,
    symplectic_fourier,
    weyl_weight,
)
from .wavelet import (
    ScaleGrid,
    Wavelet,
    WaveletCoeffs,
    admissibility_constant,
    cwt,
    icwt,
    mexican_hat,
    morlet,
    wavelet_resolution_check,
)

__version__ = "0.1.0"
