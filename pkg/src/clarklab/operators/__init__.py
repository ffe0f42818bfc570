"""Operators between model spaces, as matrices in Clark coordinates."""
from .basic import (
    IsometryReport,
    OperatorMatrix,
    RankOneData,
    clark_unitary,
    compressed_shift,
    isometry_classification,
    opnorm,
    rank_one_perturbation,
    rank_one_resolvent,
)
from .multipliers import (
    boundary_symmetry,
    g1_at_zero,
    multiplier_from_intertwiner,
    multiplier_operator,
    perturbation_from_multiplier,
)
from .structure import (
    cyclicity_check,
    krylov_basis,
    krylov_decompose,
    multiplication_perturbation,
    normalize_pair,
    triangularize_reductive,
)
from .toeplitz import (
    Symbol,
    att_inverse,
    att_operator,
    att_structure,
    direct_sum_check,
    match_zeros,
)
