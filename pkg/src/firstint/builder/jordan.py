"""Autonomous integrals involving chain functions of Jordan chains."""

from collections.abc import Mapping

from firstint.builder.columns import exponent_columns, integrals_from_columns
from firstint.builder.integral import FirstIntegral
from firstint.builder.psi import PsiChain
from firstint.spectral.common import CommonEigenData
from firstint.systems.spec import SystemSpec
from firstint.utils.logger import get_logger

logger = get_logger(__name__)


def build_jordan_integrals(
    data: CommonEigenData,
    psi: Mapping[int, PsiChain],
    spec: SystemSpec,
    tol: float = 1e-9,
    exhaustive: bool = False,
) -> list[FirstIntegral]:
    """
    Integrals whose exponent combination uses at least one chain function.

    This covers the forms nu^0 x * exp(-lambda v_1), chain functions with
    vanishing Lie derivatives (returned bare) and the mixed products of
    eigenvector powers with exponentials of chain functions. For total
    systems each result is tagged with its conjugation case.

    Args:
        data: Common eigen-tuples
        psi: Chain functions by tuple index; invalid chains are skipped
        spec: System
        tol: Relative pivot tolerance
        exhaustive: Try every minimal factor subset

    Returns:
        Autonomous integrals with chain functions
    """
    skipped = [i for i, chain in psi.items() if not chain.valid]
    if skipped:
        logger.warning("jordan_chains_suppressed", tuples=skipped)
    if not any(chain.valid for chain in psi.values()):
        return []
    integrals = integrals_from_columns(
        exponent_columns(data, spec, psi), spec, tol, exhaustive, require_chain=True
    )
    reported = [f for f in integrals if f.notes]
    for f in reported:
        logger.warning("jordan_case_conflict", expr=f.rendered, note=f.notes[0])
    logger.info("jordan_integrals_built", count=len(integrals))
    return integrals
