"""Construction of first integrals from spectral data."""

from firstint.builder.assembly import GeneralIntegral, assemble_general_integral, targets
from firstint.builder.columns import Column, ColumnKind, exponent_columns
from firstint.builder.eigen import build_eigen_integrals
from firstint.builder.exponents import exponent_solution, null_combinations, rationalize
from firstint.builder.integral import FirstIntegral, TheoremTag, make_integral
from firstint.builder.jordan import build_jordan_integrals
from firstint.builder.nonautonomous import build_nonautonomous_integrals
from firstint.builder.nonhomogeneous import build_nonhomogeneous_integrals, exp_nilpotent
from firstint.builder.psi import PsiChain, build_psi_chains, chain_functions, psi_chain

__all__ = [
    "Column",
    "ColumnKind",
    "FirstIntegral",
    "GeneralIntegral",
    "PsiChain",
    "TheoremTag",
    "assemble_general_integral",
    "build_eigen_integrals",
    "build_jordan_integrals",
    "build_nonautonomous_integrals",
    "build_nonhomogeneous_integrals",
    "build_psi_chains",
    "chain_functions",
    "exp_nilpotent",
    "exponent_columns",
    "exponent_solution",
    "make_integral",
    "null_combinations",
    "psi_chain",
    "rationalize",
    "targets",
]
