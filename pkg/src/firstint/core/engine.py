"""Analysis engine: from a system document to a verified general integral."""

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from firstint.builder.assembly import GeneralIntegral, assemble_general_integral
from firstint.builder.eigen import build_eigen_integrals
from firstint.builder.integral import FirstIntegral
from firstint.builder.jordan import build_jordan_integrals
from firstint.builder.nonautonomous import build_nonautonomous_integrals
from firstint.builder.nonhomogeneous import build_nonhomogeneous_integrals
from firstint.builder.psi import PsiChain, build_psi_chains
from firstint.core.config import AnalysisConfig
from firstint.core.report import AnalysisReport, EigenvalueEntry, SystemSummary
from firstint.expr.render import render_expr
from firstint.spectral.common import CommonEigenData, common_eigenvectors
from firstint.systems.frobenius import SolvabilityVerdict, default_grid, frobenius_check
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.config import Settings, get_settings
from firstint.utils.exceptions import FirstIntegralError, SolvabilityError
from firstint.utils.helpers import complex_to_json, format_duration
from firstint.utils.logger import get_logger, run_context
from firstint.verify.report import VerificationReport
from firstint.verify.runner import verify_integrals

logger = get_logger(__name__)


@dataclass
class AnalysisResult:
    """
    Everything an analysis run produced.

    Provides the JSON report and the rendered expressions.
    """

    spec: SystemSpec
    config: AnalysisConfig
    verdict: SolvabilityVerdict
    data: CommonEigenData | None = None
    chains: dict[int, PsiChain] = field(default_factory=dict)
    candidates: list[FirstIntegral] = field(default_factory=list)
    general: GeneralIntegral | None = None
    verification: VerificationReport | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def integrals(self) -> tuple[FirstIntegral, ...]:
        return self.general.integrals if self.general is not None else ()

    def expressions(self) -> list[str]:
        """Rendered selected integrals, autonomous first."""
        return [render_expr(f.expr) for f in self.integrals]

    def to_report(self) -> AnalysisReport:
        spectrum = []
        if self.data is not None:
            spectrum = [
                [
                    EigenvalueEntry(
                        value=complex_to_json(ev.value),
                        multiplicity=ev.multiplicity,
                        divisor_degrees=list(ev.divisor_degrees),
                    )
                    for ev in structure.eigenvalues
                ]
                for structure in self.data.eigen
            ]
        return AnalysisReport(
            system=SystemSummary(
                name=self.spec.name,
                kind=self.spec.kind.value,
                field=self.spec.field.value,
                n=self.spec.n,
                m=self.spec.m,
                forced=self.spec.is_forced,
            ),
            config=self.config.model_dump(),
            solvability=self.verdict.to_dict(),
            spectrum=spectrum,
            pivot=self.data.pivot if self.data is not None else None,
            tuples=[t.to_dict() for t in self.data.tuples] if self.data is not None else [],
            chains=[c.to_dict() for _, c in sorted(self.chains.items())],
            candidates=len(self.candidates),
            integrals=[f.to_dict() for f in self.integrals],
            general_integral=self.general.to_dict() if self.general is not None else None,
            notes=list(self.notes),
            verification=self.verification,
        )

    def save(self, output_path: str | Path) -> None:
        """
        Write the JSON report.

        Args:
            output_path: Destination file

        Example:
            >>> result.save("out/sys_3_2.report.json")
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        content = self.to_report().to_json()
        output_path.write_text(content, encoding="utf-8")
        logger.info("report_saved", path=str(output_path), size_bytes=len(content))


class AnalysisEngine:
    """
    Main engine for first integral analysis.

    Orchestrates the solvability check, the spectral pipeline, the builders,
    the selection of a general integral and, on request, verification.
    """

    def __init__(
        self, config: AnalysisConfig | None = None, settings: Settings | None = None
    ) -> None:
        """
        Initialize the engine.

        Args:
            config: Analysis configuration (defaults when omitted)
            settings: Process settings (read from the environment when omitted)
        """
        self.config = config or AnalysisConfig()
        self.settings = settings or get_settings()
        logger.info("analysis_engine_initialized", seed=self.config.seed, tol=self.config.tol)

    def _candidates(
        self,
        spec: SystemSpec,
        config: AnalysisConfig,
        data: CommonEigenData,
        chains: dict[int, PsiChain],
    ) -> list[FirstIntegral]:
        if spec.is_forced:
            return build_nonhomogeneous_integrals(data, spec, config.anchor_for(spec))
        return [
            *build_eigen_integrals(data, spec, config.tol, config.exhaustive),
            *build_jordan_integrals(data, chains, spec, config.tol, config.exhaustive),
            *build_nonautonomous_integrals(data, chains, spec),
        ]

    def analyze(self, spec: SystemSpec, require_solvable: bool | None = None) -> AnalysisResult:
        """
        Construct a general integral of a system.

        Args:
            spec: Validated system
            require_solvable: Raise on a non-solvable system (defaults to the config flag)

        Returns:
            AnalysisResult; a non-solvable system yields the verdict and no integrals

        Raises:
            SolvabilityError: If the system is not completely solvable and that is required
            FirstIntegralError: If any stage fails

        Example:
            >>> engine = AnalysisEngine()
            >>> result = engine.analyze(SystemSpec.from_file("specs/sys_3_2.json"))
            >>> len(result.integrals)
            4
        """
        config = self.config.for_spec(spec)
        required = config.require_solvable if require_solvable is None else require_solvable
        with run_context(system=spec.name or "unnamed", seed=config.seed):
            return self._analyze(spec, config, required)

    def _analyze(
        self, spec: SystemSpec, config: AnalysisConfig, required: bool
    ) -> AnalysisResult:
        start_time = time.time()
        logger.info("analysis_started", kind=spec.kind.value, n=spec.n, m=spec.m)
        try:
            grid = None
            if spec.is_forced and spec.kind is SystemKind.TOTAL:
                grid = default_grid(spec.directions, config.compat_grid)
            verdict = frobenius_check(spec, config.tol, grid)
            result = AnalysisResult(spec=spec, config=config, verdict=verdict)
            if not verdict.solvable:
                message = "System is not completely solvable"
                if required:
                    raise SolvabilityError(message, verdict=verdict.to_dict())
                result.notes.append(message)
                return result

            data = common_eigenvectors(
                spec, tol=config.tol, pivot_overrides=dict(spec.pivot_overrides) or None
            )
            rng = np.random.default_rng(config.seed)
            chains = build_psi_chains(
                data, spec, rng, config.psi_samples, config.mu_tol, config.box, config.margin
            )
            candidates = self._candidates(spec, config, data, chains)
            general = assemble_general_integral(
                candidates, spec, rng, config.box, config.margin
            )
            result.data = data
            result.chains = chains
            result.candidates = candidates
            result.general = general
            result.notes.extend(data.notes)
            result.notes.extend(
                f"chain of tuple {i} suppressed" for i, c in sorted(chains.items()) if not c.valid
            )
            result.notes.extend(general.notes)

            duration_ms = (time.time() - start_time) * 1000
            logger.info(
                "analysis_completed",
                candidates=len(candidates),
                selected=len(general.integrals),
                duration=format_duration(duration_ms),
            )
            return result

        except FirstIntegralError as e:
            duration_ms = (time.time() - start_time) * 1000
            logger.error(
                "analysis_failed",
                error=str(e),
                duration=format_duration(duration_ms),
            )
            raise
        except Exception as e:
            duration_ms = (time.time() - start_time) * 1000
            logger.error(
                "analysis_failed",
                error=str(e),
                duration=format_duration(duration_ms),
            )
            raise FirstIntegralError(f"Analysis failed: {e}") from e

    def verify(self, spec: SystemSpec) -> AnalysisResult:
        """
        Analyze a system and run the verification suite on its general integral.

        Verification needs a completely solvable system.

        Raises:
            SolvabilityError: If the system is not completely solvable
        """
        result = self.analyze(spec, require_solvable=True)
        with run_context(system=spec.name or "unnamed", seed=result.config.seed):
            start_time = time.time()
            result.verification = verify_integrals(
                spec, result.integrals, result.verdict, result.config, self.settings.threads
            )
            logger.info(
                "verification_finished",
                passed=result.verification.passed,
                duration=format_duration((time.time() - start_time) * 1000),
            )
        return result
