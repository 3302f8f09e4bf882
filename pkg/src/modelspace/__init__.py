"""Constructive model-space toolkit for rational inner functions."""

from .errors import *  # noqa: F401,F403
from .scalar import BlaschkeProduct, RationalFunction, bt_decompose, inner_lattice, inner_outer_scalar
from .matrix import RationalMatrix, check_inner, truncated_operator
from .beurling import (
    adjoint_hankel_kernel_inner,
    canonical_decompose,
    complementary_factor,
    delta_s,
    dss_factorize,
    inner_outer_matrix,
    model_space_to_inner,
)
from .spectral import matrix_spectral_factor
from .multiplicity import beurling_degree, char_scalar, delta_sequence, spectral_multiplicity

__version__ = "0.1.0"
