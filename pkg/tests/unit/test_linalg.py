"""Tests for elimination, characteristic polynomials and Jordan structure."""

from collections.abc import Callable

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from firstint.linalg import (
    aberth_roots,
    characteristic_polynomial,
    cluster_roots,
    eigen_structure,
    jordan_chain,
    normalize_vector,
    nullspace,
    rank,
    rref,
    solve_min_norm,
)
from firstint.systems.spec import SystemSpec
from firstint.utils.exceptions import InputError, StructuralError


class TestElimination:
    """Tests for rref, rank, nullspace and consistent solves."""

    def test_rref_identity(self) -> None:
        """The identity is its own reduced form with every column a pivot."""
        reduced, pivots = rref(np.eye(3), 1e-9)
        assert np.allclose(reduced, np.eye(3))
        assert pivots == (0, 1, 2)

    def test_rank_of_dependent_rows(self) -> None:
        """Proportional rows count once."""
        assert rank(np.array([[1.0, 2.0], [2.0, 4.0]]), 1e-9) == 1

    def test_rank_ignores_entries_below_tolerance(self) -> None:
        """Entries at the tolerance level are treated as zero."""
        matrix = np.array([[1.0, 0.0], [0.0, 1e-14]])
        assert rank(matrix, 1e-9) == 1

    def test_nullspace_basis(self) -> None:
        """The free variable is set to one and pivots are back-substituted."""
        basis = nullspace(np.array([[1.0, 2.0], [2.0, 4.0]]), 1e-9)
        assert len(basis) == 1
        assert np.allclose(basis[0], [-2.0, 1.0])

    def test_nullspace_of_zero_matrix(self) -> None:
        """Every column is free for the zero matrix."""
        basis = nullspace(np.zeros((3, 3)), 1e-9)
        assert len(basis) == 3
        assert np.allclose(basis[0], [1.0, 0.0, 0.0])

    def test_nullspace_full_rank_is_empty(self) -> None:
        """A nonsingular matrix has a trivial kernel."""
        assert nullspace(np.array([[2.0, 1.0], [1.0, 1.0]]), 1e-9) == []

    def test_nullspace_rejects_bad_tolerance(self) -> None:
        """A non-positive tolerance is an input error."""
        with pytest.raises(InputError):
            nullspace(np.eye(2), 0.0)

    def test_nullspace_rejects_nan(self) -> None:
        """Non-finite entries are located by the error pointer."""
        with pytest.raises(InputError) as exc_info:
            nullspace(np.array([[1.0, np.nan]]), 1e-9)
        assert exc_info.value.pointer == "/0/1"

    def test_solve_min_norm(self) -> None:
        """An underdetermined consistent system gets its minimum-norm solution."""
        x = solve_min_norm(np.array([[1.0, 1.0]]), np.array([2.0]), 1e-9)
        assert np.allclose(x, [1.0, 1.0])

    def test_solve_inconsistent(self) -> None:
        """An inconsistent system is a structural error."""
        with pytest.raises(StructuralError):
            solve_min_norm(np.array([[1.0], [1.0]]), np.array([1.0, 2.0]), 1e-9)


class TestPolynomials:
    """Tests for characteristic polynomials and Aberth roots."""

    def test_identity_polynomial(self) -> None:
        """(lambda - 1)^2 for the 2x2 identity."""
        coeffs = characteristic_polynomial(np.eye(2, dtype=complex))
        assert np.allclose(coeffs, [1.0, -2.0, 1.0])

    def test_rotation_polynomial(self) -> None:
        """lambda^2 + 1 for the plane rotation generator."""
        coeffs = characteristic_polynomial(np.array([[0, 1], [-1, 0]], dtype=complex))
        assert np.allclose(coeffs, [1.0, 0.0, 1.0])

    def test_aberth_simple_roots(self) -> None:
        """Roots of (z - 1)(z - 2)."""
        roots = np.sort_complex(aberth_roots(np.array([1.0, -3.0, 2.0])))
        assert np.allclose(roots, [1.0, 2.0])

    def test_aberth_splits_zero_roots(self) -> None:
        """Trailing zero coefficients give exact zero roots."""
        roots = aberth_roots(np.array([1.0, -1.0, 0.0, 0.0]))
        assert sorted(abs(r) for r in roots)[:2] == [0.0, 0.0]
        assert any(abs(r - 1.0) < 1e-12 for r in roots)

    def test_clusters_perturbed_triple_root(self) -> None:
        """Three roots scattered around 2 collapse to one triple root."""
        coeffs = np.array([1.0, -6.0, 12.0, -8.0], dtype=complex)
        roots = 2.0 + 1e-5 * np.exp(2j * np.pi * np.arange(3) / 3)
        found, ambiguous = cluster_roots(coeffs, roots, 1e-9)
        assert len(found) == 1
        centre, multiplicity = found[0]
        assert abs(centre - 2.0) < 1e-9
        assert multiplicity == 3
        assert not ambiguous


class TestEigenStructure:
    """Tests for eigenvalue multiplicities, elementary divisors and chains."""

    def test_identity_has_simple_divisors(self) -> None:
        """The identity has one eigenvalue with four divisors of degree one."""
        es = eigen_structure(np.eye(4))
        assert len(es.eigenvalues) == 1
        assert es.eigenvalues[0].value == 1
        assert es.eigenvalues[0].divisor_degrees == (1, 1, 1, 1)

    def test_jordan_block(self) -> None:
        """A 3x3 Jordan block has a single divisor of degree three."""
        block = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]])
        es = eigen_structure(block)
        assert len(es.eigenvalues) == 1
        assert es.eigenvalues[0].multiplicity == 3
        assert es.eigenvalues[0].divisor_degrees == (3,)
        chain = es.chains[0][0]
        shifted = block - 2.0 * np.eye(3)
        for k in range(1, 3):
            assert np.allclose(shifted @ chain[k], k * chain[k - 1], atol=1e-8)

    def test_complex_eigenvalues(self) -> None:
        """The rotation generator has eigenvalues -i and i."""
        es = eigen_structure(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        values = sorted((ev.value for ev in es.eigenvalues), key=lambda z: z.imag)
        assert values == [-1j, 1j]

    def test_operator_of_nilpotent_ode(self) -> None:
        """The operator of an ODE with elementary divisor lambda^2 and a simple eigenvalue 1."""
        matrix = np.array([[4.0, -5.0, 2.0], [5.0, -7.0, 3.0], [6.0, -9.0, 4.0]])
        es = eigen_structure(matrix.T)
        degrees = {ev.value: ev.divisor_degrees for ev in es.eigenvalues}
        assert degrees == {0: (2,), 1: (1,)}

    def test_rejects_non_square(self) -> None:
        """Shape errors are input errors."""
        with pytest.raises(InputError):
            eigen_structure(np.zeros((2, 3)))

    def test_rejects_oversized_matrix(self) -> None:
        """Dimensions above 32 are refused."""
        with pytest.raises(InputError):
            eigen_structure(np.eye(33))

    def test_normalize_vector_pivot(self) -> None:
        """The leading entry within 10% of the maximum becomes one."""
        v = normalize_vector(np.array([0.0, 2.0, -2.1]))
        assert np.allclose(v, [0.0, 1.0, -1.05])

    def test_jordan_chain_rejects_non_eigenvector(self) -> None:
        """The head must be an eigenvector."""
        with pytest.raises(InputError):
            jordan_chain(np.diag([1.0, 2.0]), 1.0, 1, np.array([1.0, 1.0]), 1e-9)

    def test_jordan_chain_too_long(self) -> None:
        """A diagonalizable matrix has no chain of length two."""
        with pytest.raises(StructuralError) as exc_info:
            jordan_chain(np.diag([1.0, 2.0]), 1.0, 2, np.array([1.0, 0.0]), 1e-9)
        assert exc_info.value.achieved == 1

    def test_real_triple_eigenvalue(self, jordan_3_17: SystemSpec) -> None:
        """The eigenvalue 2 is found once with a single divisor of degree three."""
        es = eigen_structure(jordan_3_17.operators[0])
        assert len(es.eigenvalues) == 1
        assert abs(es.eigenvalues[0].value - 2.0) < 1e-9
        assert es.eigenvalues[0].multiplicity == 3
        assert es.eigenvalues[0].divisor_degrees == (3,)

    def test_quadruple_eigenvalue(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """The first operator of a total system is one block of size four at 1."""
        es = eigen_structure(load_spec("sys_2_18").operators[0])
        assert len(es.eigenvalues) == 1
        assert abs(es.eigenvalues[0].value - 1.0) < 1e-9
        assert es.eigenvalues[0].divisor_degrees == (4,)

    @pytest.mark.parametrize("name", ["sys_2_21", "sys_2_32", "sys_3_20"])
    def test_complex_triple_eigenvalues(
        self, load_spec: Callable[[str], SystemSpec], name: str
    ) -> None:
        """1 + 2i and 1 - 2i each carry one divisor of degree three."""
        es = eigen_structure(load_spec(name).operators[0])
        assert len(es.eigenvalues) == 2
        for ev in es.eigenvalues:
            assert abs(abs(ev.value - 1.0) - 2.0) < 1e-9
            assert abs(ev.value.real - 1.0) < 1e-9
            assert ev.multiplicity == 3
            assert ev.divisor_degrees == (3,)
        assert not es.ambiguous

    @seed(20240501)
    @settings(max_examples=40, deadline=None)
    @given(
        arrays(
            np.float64,
            (3, 3),
            elements=st.integers(min_value=-5, max_value=5).map(float),
        )
    )
    def test_multiplicities_cover_dimension(self, matrix: np.ndarray) -> None:
        """Multiplicities add up to n and every numpy eigenvalue is found."""
        es = eigen_structure(matrix)
        assert sum(ev.multiplicity for ev in es.eigenvalues) == 3
        found = [ev.value for ev in es.eigenvalues]
        for reference in np.linalg.eigvals(matrix):
            assert min(abs(reference - value) for value in found) < 1e-4
