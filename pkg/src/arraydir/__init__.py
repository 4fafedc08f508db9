"""Closed-form directivity for volumetric antenna arrays with sin^u cos^v elements."""

from .array_model import (AntennaArray, ArrayElement, ArrayFileError, PairGeometry, dump_array,
                          generate_array, load_array, pair_geometry, random_array, read_array,
                          write_array)
from .directivity import (DirectivityResult, NormalizationBreakdown, NormalizationError, ScanResult,
                          directivity, normalization, normalization_cross, normalization_self, scan,
                          specialized_normalization)
from .pattern import (Direction, ElementPattern, array_factor, element_factor, omega,
                      radiation_intensity, unit_vector)
from .quadrature import (QuadratureError, QuadratureResult, cross_integral_numeric, integrate_1d,
                         normalization_numeric, parity_check, phi_identity_check)
from .sinc_derivative import Term, TermSum, derive_terms, eval_series, eval_terms, sinc_derivative
from .special import bessel_j0, beta_half, sinc_radius

__version__ = "0.1.0"
