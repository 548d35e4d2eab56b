"""Autonomous integrals built from common eigenvectors alone."""

from firstint.builder.columns import exponent_columns, integrals_from_columns
from firstint.builder.integral import FirstIntegral
from firstint.spectral.common import CommonEigenData
from firstint.systems.spec import SystemSpec
from firstint.utils.logger import get_logger

logger = get_logger(__name__)


def build_eigen_integrals(
    data: CommonEigenData,
    spec: SystemSpec,
    tol: float = 1e-9,
    exhaustive: bool = False,
) -> list[FirstIntegral]:
    """
    Products of powers of eigenvector forms with constant Lie derivative zero.

    Real tuples contribute |nu x|^h, complex tuples of real systems contribute
    P^h * exp(h' phi) and combinations without logarithms are arctangent
    sums. A zero eigenvalue gives the bare linear form; two tuples with equal
    eigenvalues give their ratio.

    Args:
        data: Common eigen-tuples
        spec: System
        tol: Relative pivot tolerance
        exhaustive: Try every minimal factor subset instead of the RREF basis

    Returns:
        Autonomous integrals; empty when the tuples are too few (the Jordan
        builders may still find some)
    """
    integrals = integrals_from_columns(
        exponent_columns(data, spec), spec, tol, exhaustive, require_chain=False
    )
    if not integrals:
        logger.info("eigen_integrals_none", tuples=len(data.tuples), directions=spec.directions)
    logger.info("eigen_integrals_built", count=len(integrals))
    return integrals
