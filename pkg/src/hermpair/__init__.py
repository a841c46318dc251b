"""Canonical forms for pairs (H, C): a nondegenerate Hermitian form and an
antilinear operator v -> C conj(v) that is self-adjoint for it."""
from .altforms import alt_canonicalize, block_converter, is_glr_symmetry
from .atlas import (
    CanonicalBlock,
    assemble,
    build_alt_block,
    build_basic,
    build_pair_block,
    catalan_closed_form,
    catalan_coefficients,
    jordan_square_root,
    sort_blocks,
)
from .canonicalizer import (
    CanonicalForm,
    canonicalize_operator,
    canonicalize_pair,
    verify_canonical,
    witness_form,
)
from .glr import GlrBlock, glr_canonicalize
from .harness import brute_force_1d_oracle, orbit_check, random_canonical_pair
from .linalg import DEFAULT_TOL, InputError, NumericalFailure, ToleranceConfig
from .normalizers import (
    ChainBasis,
    fourier_seed_angle,
    glr_seed_vector,
    normalize_negative,
    normalize_nonreal,
    normalize_positive,
    normalize_zero,
    toeplitz_rescale,
)
from .pair import (
    SelfAdjointPair,
    ValidationError,
    antilinear_power,
    apply_basis_change,
    square_operator,
    symmetric_form_of_pair,
    validate_pair,
)
from .spectral import (
    orthogonal_complement,
    primary_decomposition,
    real_filtration,
    restrict_pair,
    spectral_profile,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
