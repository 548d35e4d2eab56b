"""Tests for exponent systems, chain functions, integral builders and assembly."""

from collections.abc import Callable

import numpy as np
import pytest

from firstint.builder import (
    FirstIntegral,
    TheoremTag,
    assemble_general_integral,
    build_eigen_integrals,
    build_jordan_integrals,
    build_nonautonomous_integrals,
    build_nonhomogeneous_integrals,
    build_psi_chains,
    chain_functions,
    exp_nilpotent,
    exponent_solution,
    make_integral,
    null_combinations,
    psi_chain,
    rationalize,
    targets,
)
from firstint.builder.nonhomogeneous import restriction
from firstint.expr import lie_batch, parse_expr, render_expr
from firstint.spectral import CommonEigenData, common_eigenvectors
from firstint.systems.sampling import safe_points
from firstint.systems.spec import SystemSpec
from firstint.utils.exceptions import InputError, StructuralError


def max_lie_residual(integral: FirstIntegral, spec: SystemSpec, count: int = 30) -> float:
    """Largest relative Lie derivative over seeded safe points."""
    rng = np.random.default_rng(5)
    t, x = safe_points(spec, integral.excluded_hyperplanes, count, rng, box=1.5, margin=0.05)
    quad, rates = integral.quad_env(t)
    worst = 0.0
    for j in range(spec.directions):
        values, derivs = lie_batch(integral.expr, spec, j, t, x, quad, rates)
        worst = max(worst, float(np.max(np.abs(derivs) / (1.0 + np.abs(values)))))
    return worst


class TestExponents:
    """Tests for rationalized nullspaces."""

    def test_rationalize_halves(self) -> None:
        """Half-integers scale to integers."""
        assert np.array_equal(rationalize(np.array([0.5, -1.0, 1.5])), [1, -2, 3])

    def test_rationalize_zero_vector(self) -> None:
        """The zero vector is returned unchanged."""
        assert np.array_equal(rationalize(np.zeros(2)), [0, 0])

    def test_exponent_solution(self) -> None:
        """Equal rates of opposite exponents cancel."""
        h = exponent_solution(np.array([[1.0, 1.0, -2.0]]), real=True)
        assert np.array_equal(h, [1, -1, 0])

    def test_zero_rate(self) -> None:
        """A single zero rate is its own solution."""
        assert np.array_equal(exponent_solution(np.array([[0.0]]), real=True), [1])

    def test_trivial_nullspace(self) -> None:
        """A nonzero rate admits no combination."""
        with pytest.raises(StructuralError):
            exponent_solution(np.array([[1.0]]), real=True)

    def test_basis_combinations(self) -> None:
        """The default mode returns one vector per free column."""
        combos = null_combinations(np.array([[1.0, 1.0, 2.0]]), real=True)
        assert len(combos) == 2
        for c in combos:
            assert abs(np.dot([1.0, 1.0, 2.0], c)) < 1e-12

    def test_exhaustive_combinations(self) -> None:
        """Exhaustive mode lists every minimal dependent subset."""
        combos = null_combinations(np.array([[1.0, 1.0, 2.0]]), real=True, exhaustive=True)
        supports = {tuple(np.flatnonzero(c)) for c in combos}
        assert supports == {(0, 1), (0, 2), (1, 2)}

    def test_no_columns(self) -> None:
        """An empty rate matrix has no combinations."""
        assert null_combinations(np.zeros((1, 0)), real=True) == []


class TestChainFunctions:
    """Tests for chain functions and their Lie derivatives."""

    def test_first_chain_function(self) -> None:
        """v_1 is the ratio of the first two chain forms."""
        _, functions = chain_functions([np.array([1, -1, 1]), np.array([1, 0, -1])])
        assert render_expr(functions[0]) == "lin([1,0,-1])*pow(lin([1,-1,1]),-1)"

    def test_second_chain_function(self) -> None:
        """v_2 subtracts v_1 times the first form before dividing."""
        forms, functions = chain_functions([np.eye(3)[0], np.eye(3)[1], np.eye(3)[2]])
        assert len(forms) == 3
        assert len(functions) == 2
        assert "pow(lin([1,0,0]),-1)" in render_expr(functions[1])

    def test_jordan_chain_is_valid(self, jordan_3_17: SystemSpec, rng: np.random.Generator) -> None:
        """A genuine chain has constant derivatives with L v_1 = 1."""
        data = common_eigenvectors(jordan_3_17)
        chains = build_psi_chains(data, jordan_3_17, rng, samples=40)
        chain = chains[0]
        assert chain.valid
        assert chain.pivot_ok
        assert chain.mu[0, 0] == 1
        assert chain.mu[1, 0] == 0
        assert chain.reconstruction_error < 1e-8

    def test_broken_chain_is_invalid(
        self, jordan_3_17: SystemSpec, rng: np.random.Generator
    ) -> None:
        """A perturbed second vector fails the checks."""
        tup = common_eigenvectors(jordan_3_17).tuples[0]
        broken = (tup.chain[0], tup.chain[1] + np.array([0.3, 0.0, 0.1]))
        chain = psi_chain(broken, 0, jordan_3_17, rng, samples=40)
        assert not chain.valid

    def test_short_chain_rejected(self, jordan_3_17: SystemSpec, rng: np.random.Generator) -> None:
        """A lone eigenvector has no chain functions."""
        with pytest.raises(InputError):
            psi_chain([np.array([1.0, 0.0, 0.0])], 0, jordan_3_17, rng)

    def test_chain_of_commuting_family(
        self, load_spec: Callable[[str], SystemSpec], rng: np.random.Generator
    ) -> None:
        """Chain functions of a size four block have constant derivatives along both matrices."""
        spec = load_spec("sys_2_18")
        chain = [
            np.array([-1.0, 1.0, -1.0, 0.0]),
            np.array([1.0, 0.0, -1.0, -1.0]),
            np.array([1.0, -1.0, 3.0, 0.0]),
            np.array([-3.0, 0.0, 9.0, 9.0]),
        ]
        result = psi_chain(chain, 0, spec, rng, samples=40, box=1.5, margin=0.05)
        assert result.valid
        assert np.array_equal(result.mu, [[1, -1], [0, 0], [0, 6]])
        assert result.reconstruction_error < 1e-8


class TestBuilders:
    """Tests for the integral families."""

    def test_zero_eigenvalue_gives_linear_form(self, ode_3_2: SystemSpec) -> None:
        """The kernel vector of the operator is emitted bare."""
        integrals = build_eigen_integrals(common_eigenvectors(ode_3_2), ode_3_2)
        rendered = [f.rendered for f in integrals]
        assert "lin([1,-1,1,-1])" in rendered
        assert len(integrals) == 3
        for f in integrals:
            assert f.autonomous
            assert f.theorem_tag.priority == 0
            assert max_lie_residual(f, ode_3_2) < 1e-8

    def test_complex_tuples(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """Complex eigenvalues contribute quadratic forms and phases."""
        spec = load_spec("sys_3_6")
        integrals = build_eigen_integrals(common_eigenvectors(spec), spec)
        assert len(integrals) == 2
        assert any("atan2" in f.rendered for f in integrals)
        for f in integrals:
            assert max_lie_residual(f, spec) < 1e-8

    def test_total_system(self, total_2_3: SystemSpec) -> None:
        """Autonomous integrals are constant along both directions."""
        integrals = build_eigen_integrals(common_eigenvectors(total_2_3), total_2_3)
        assert integrals
        for f in integrals:
            assert max_lie_residual(f, total_2_3) < 1e-8

    def test_jordan_integrals(self, jordan_3_17: SystemSpec, rng: np.random.Generator) -> None:
        """A single chain of length three gives two autonomous integrals."""
        data = common_eigenvectors(jordan_3_17)
        psi = build_psi_chains(data, jordan_3_17, rng, samples=40)
        integrals = build_jordan_integrals(data, psi, jordan_3_17)
        assert len(integrals) == 2
        for f in integrals:
            assert f.autonomous
            assert max_lie_residual(f, jordan_3_17) < 1e-8

    def test_invalid_chains_give_nothing(
        self, jordan_3_17: SystemSpec, rng: np.random.Generator
    ) -> None:
        """Chains that fail their checks are suppressed."""
        data = common_eigenvectors(jordan_3_17)
        tup = data.tuples[0]
        broken = psi_chain(
            (tup.chain[0], tup.chain[1] + np.array([0.3, 0.0, 0.1])), 0, jordan_3_17, rng, 40
        )
        assert build_jordan_integrals(data, {0: broken}, jordan_3_17) == []

    def test_nonautonomous_integrals(self, ode_3_2: SystemSpec) -> None:
        """One damped form per tuple; the zero rate stays autonomous."""
        data = common_eigenvectors(ode_3_2)
        integrals = build_nonautonomous_integrals(data, {}, ode_3_2)
        assert len(integrals) == 4
        assert sum(f.autonomous for f in integrals) == 1
        for f in integrals:
            assert f.theorem_tag is TheoremTag.T3_8
            assert max_lie_residual(f, ode_3_2) < 1e-8

    def test_nonautonomous_chain_functions(
        self, jordan_3_17: SystemSpec, rng: np.random.Generator
    ) -> None:
        """v_1 minus time is an integral of the Jordan system."""
        data = common_eigenvectors(jordan_3_17)
        psi = build_psi_chains(data, jordan_3_17, rng, samples=40)
        integrals = build_nonautonomous_integrals(data, psi, jordan_3_17)
        assert any(f.theorem_tag is TheoremTag.T3_9 for f in integrals)
        for f in integrals:
            assert max_lie_residual(f, jordan_3_17) < 1e-8

    @pytest.mark.parametrize("name", ["forced_3_10", "forced_3_11", "forced_2_2"])
    def test_forced_integrals(self, load_spec: Callable[[str], SystemSpec], name: str) -> None:
        """Damped forms minus their accumulators are constant along the forced field."""
        spec = load_spec(name)
        integrals = build_nonhomogeneous_integrals(common_eigenvectors(spec), spec)
        assert integrals
        for f in integrals:
            assert not f.autonomous
            assert f.quadratures
            assert max_lie_residual(f, spec, count=10) < 1e-6

    def test_forced_rlinear_rejected(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """R-linear systems have no forced family."""
        spec = load_spec("sys_1_18")
        empty = CommonEigenData(tuples=(), pivot=0, eigen=())
        with pytest.raises(InputError):
            build_nonhomogeneous_integrals(empty, spec)

    def test_exp_nilpotent(self) -> None:
        """exp(-N t) of a 2x2 Jordan nilpotent is I - N t."""
        n = np.array([[0.0, 1.0], [0.0, 0.0]])
        poly = exp_nilpotent([n], 2)
        assert set(poly) == {(0,), (1,)}
        assert np.allclose(poly[(0,)], np.eye(2))
        assert np.allclose(poly[(1,)], -n)

    def test_restriction_of_eigenvector(self, ode_3_2: SystemSpec) -> None:
        """An eigenvector spans an invariant line."""
        tup = common_eigenvectors(ode_3_2).tuples[0]
        s_list, defect = restriction(tup.vector[:, None], ode_3_2.operators)
        assert defect < 1e-12
        assert s_list[0][0, 0] == pytest.approx(tup.lambdas[0])


class TestAssembly:
    """Tests for target ranks and greedy selection."""

    @pytest.mark.parametrize(
        ("name", "expected"),
        [
            ("sys_3_2", (3, 4)),
            ("sys_2_3", (2, 4)),
            ("sys_1_18", (4, 6)),
            ("forced_3_11", (0, 3)),
            ("trivial_1", (0, 1)),
        ],
    )
    def test_targets(
        self, load_spec: Callable[[str], SystemSpec], name: str, expected: tuple[int, int]
    ) -> None:
        """Targets depend on the kind, dimensions and forcing."""
        assert targets(load_spec(name)) == expected

    def test_full_rank_selection(self, ode_3_2: SystemSpec, rng: np.random.Generator) -> None:
        """Eigen and damped integrals reach both targets."""
        data = common_eigenvectors(ode_3_2)
        pool = build_eigen_integrals(data, ode_3_2) + build_nonautonomous_integrals(
            data, {}, ode_3_2
        )
        general = assemble_general_integral(pool, ode_3_2, rng)
        assert general.autonomous_rank == 3
        assert general.total_rank == 4
        assert len(general.integrals) == 4
        assert [f.autonomous for f in general.integrals] == [True, True, True, False]
        assert general.notes == ()

    def test_dependent_candidates_are_dropped(
        self, rotation_spec: SystemSpec, rng: np.random.Generator
    ) -> None:
        """A function of an earlier integral does not raise the rank."""
        candidates = [
            make_integral(parse_expr(text), TheoremTag.T3_2, [], rotation_spec)
            for text in ("pow(x1,2) + pow(x2,2)", "pow(pow(x1,2) + pow(x2,2),2)")
        ]
        general = assemble_general_integral(candidates, rotation_spec, rng)
        assert general.autonomous_rank == 1
        assert len(general.integrals) == 1
        assert any("total rank 1 below target 2" in note for note in general.notes)

    def test_empty_pool(self, rotation_spec: SystemSpec, rng: np.random.Generator) -> None:
        """No candidates is a noted shortfall."""
        general = assemble_general_integral([], rotation_spec, rng)
        assert general.total_rank == 0
        assert general.notes == ("no candidate integrals",)

    def test_selection_is_deterministic(self, ode_3_2: SystemSpec) -> None:
        """Equal seeds select the same integrals."""
        data = common_eigenvectors(ode_3_2)
        pool = build_eigen_integrals(data, ode_3_2)
        first = assemble_general_integral(pool, ode_3_2, np.random.default_rng(2))
        second = assemble_general_integral(pool, ode_3_2, np.random.default_rng(2))
        assert [f.rendered for f in first.integrals] == [f.rendered for f in second.integrals]
