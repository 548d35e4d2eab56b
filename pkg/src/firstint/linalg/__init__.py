"""Dense complex linear algebra on small matrices."""

from firstint.linalg.eigen import (
    EigenStructure,
    Eigenvalue,
    eigen_structure,
    jordan_chain,
    normalize_vector,
)
from firstint.linalg.elimination import (
    as_cmatrix,
    inf_norm,
    nullspace,
    rank,
    rref,
    solve_min_norm,
)
from firstint.linalg.polynomial import aberth_roots, characteristic_polynomial, cluster_roots

__all__ = [
    "EigenStructure",
    "Eigenvalue",
    "eigen_structure",
    "jordan_chain",
    "normalize_vector",
    "as_cmatrix",
    "inf_norm",
    "nullspace",
    "rank",
    "rref",
    "solve_min_norm",
    "aberth_roots",
    "characteristic_polynomial",
    "cluster_roots",
]
