"""Numerical verification of a Lambert-series identity for Siegel cusp forms.

The identity expresses a Lambert series built from a coefficient model's
Dirichlet coefficients as a Whittaker-function series, a residue at ``s = k``
and a sum over the nontrivial zeros of ``L(s, chi^2)``.  Every component is
computed independently and carries an error bound.
"""

from .characters import (DirichletCharacter, character_from_label, enumerate_characters,
                         gauss_sum, principal_character, square_character)
from .dirichlet_series import (CoefficientSequence, D_star, SeriesQuotientSpec,
                               a_FG_coefficients, convolve, dirichlet_inverse)
from .errors import SiegelLambertError
from .identity import (IdentityReport, IdentityTask, asymptotic_probe, contour_check,
                       right_line_integral, verify_identity)
from .lfunctions import dirichlet_L, modular_L, riemann_zeta
from .numerics import Estimate
from .providers import SiegelPairModel, file_pair_model, sk_pair_model
from .special_functions import meijer_g_120, whittaker_W
from .zeros import ZeroList, find_zeros, hardy_Z, read_zero_file, write_zero_file

__version__ = "0.1.0"

__all__ = [
    "CoefficientSequence", "D_star", "DirichletCharacter", "Estimate", "IdentityReport",
    "IdentityTask", "SeriesQuotientSpec", "SiegelLambertError", "SiegelPairModel", "ZeroList",
    "a_FG_coefficients", "asymptotic_probe", "character_from_label", "contour_check",
    "convolve", "dirichlet_L", "dirichlet_inverse", "enumerate_characters", "file_pair_model",
    "find_zeros", "gauss_sum", "hardy_Z", "meijer_g_120", "modular_L", "principal_character",
    "read_zero_file", "riemann_zeta", "right_line_integral", "sk_pair_model",
    "square_character", "verify_identity", "whittaker_W", "write_zero_file",
]
