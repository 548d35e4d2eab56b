"""Cross-matrix spectral structure of commuting families."""

from firstint.spectral.common import (
    CommonEigenData,
    EigenTuple,
    common_eigenvectors,
    direction_rates,
    select_pivot_matrix,
)

__all__ = [
    "CommonEigenData",
    "EigenTuple",
    "common_eigenvectors",
    "direction_rates",
    "select_pivot_matrix",
]
