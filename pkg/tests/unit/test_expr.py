"""Tests for expression parsing, rendering, evaluation and excluded sets."""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from firstint.expr import (
    Const,
    HyperplaneKind,
    LinForm,
    Point,
    QuadratureSpec,
    Sum,
    Var,
    canonical,
    collect_hyperplanes,
    eval_dual,
    eval_expr,
    evaluate,
    evaluate_dual,
    first_event,
    lie_derivative,
    parse_expr,
    render_expr,
    safe_mask,
)
from firstint.expr.nodes import quadrature_names, uses_state, uses_time
from firstint.systems.spec import SystemSpec
from firstint.utils.exceptions import DomainError, InputError


def at(*x: float, t: tuple[float, ...] = (0.0,)) -> Point:
    return Point.of(list(t), list(x))


class TestParser:
    """Tests for the expression grammar."""

    def test_linear_form(self) -> None:
        """lin([...]) parses to a linear form."""
        e = parse_expr("lin([1,-2,1])")
        assert isinstance(e, LinForm)
        assert e.coeffs == (1, -2, 1)

    def test_complex_literal(self) -> None:
        """A parenthesized pair is a complex constant."""
        assert parse_expr("(1,2)") == Const(1 + 2j)

    def test_variables_are_one_based(self) -> None:
        """x1 is the first state variable and t2 the second time."""
        assert parse_expr("x1") == Var("x", 0)
        assert parse_expr("t2") == Var("t", 1)

    def test_division_renders_as_power(self) -> None:
        """Division is read as a product with a reciprocal."""
        assert render_expr(parse_expr("x1/x2")) == "pow(x2,-1)*x1"

    @pytest.mark.parametrize(
        "text",
        ["lin([1,", "foo(x1)", "x0", "x1 +", "pow(x1)", "1 2"],
    )
    def test_invalid_input(self, text: str) -> None:
        """Malformed expressions are input errors."""
        with pytest.raises(InputError):
            parse_expr(text)

    def test_error_keeps_pointer(self) -> None:
        """The caller's JSON pointer is reported."""
        with pytest.raises(InputError) as exc_info:
            parse_expr("exp(", pointer="/reference/0")
        assert exc_info.value.pointer == "/reference/0"

    def test_time_and_state_detection(self) -> None:
        """Structural queries on trees."""
        e = parse_expr("x1*exp(-2*t1) + quad(q0_0)")
        assert uses_time(e)
        assert uses_state(e)
        assert quadrature_names(e) == ("q0_0",)
        assert not uses_state(parse_expr("exp(t1)"))


class TestRender:
    """Tests for deterministic rendering and canonical forms."""

    def test_sum_children_are_sorted(self) -> None:
        """Child order does not change the rendering."""
        assert render_expr(parse_expr("x2 + x1")) == render_expr(parse_expr("x1 + x2"))

    def test_canonical_folds_constants(self) -> None:
        """Nested sums are flattened and constants folded."""
        e = canonical(Sum((Const(1), Sum((Var("x", 0), Const(2))))))
        assert render_expr(e) == "3 + x1"

    def test_canonical_drops_unit_factor(self) -> None:
        """A product with coefficient 1 loses the constant."""
        e = canonical(parse_expr("1*x1*x2"))
        assert render_expr(e) == "x1*x2"

    @seed(11)
    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=2, max_size=4),
        st.integers(min_value=-3, max_value=3),
    )
    def test_rendering_is_a_fixed_point(self, coeffs: list[int], power: int) -> None:
        """Parsing a rendering and rendering again gives the same text."""
        text = render_expr(
            canonical(parse_expr(f"pow(lin({coeffs}),{power})*exp(x1) + atan2(x2,x1)"))
        )
        assert render_expr(canonical(parse_expr(text))) == text


class TestEvaluate:
    """Tests for values and forward-mode derivatives."""

    def test_linear_form_value(self) -> None:
        """nu . x at a point."""
        assert eval_expr(parse_expr("lin([1,-1,1,-1])"), at(4, 1, 2, 0)) == 5

    def test_batch_evaluation(self) -> None:
        """Batches evaluate row by row."""
        values = evaluate(parse_expr("x1*x2"), np.zeros((2, 1)), np.array([[1, 2], [3, 4]]))
        assert np.allclose(values, [2, 12])

    def test_product_derivative(self) -> None:
        """d(x1 x2) along x1 is x2."""
        _, deriv = eval_dual(parse_expr("x1*x2"), at(2, 3), np.array([0, 1, 0]))
        assert deriv == pytest.approx(3)

    def test_time_derivative(self) -> None:
        """d/dt exp(-2 t1) = -2 exp(-2 t1)."""
        value, deriv = eval_dual(parse_expr("exp(-2*t1)"), at(1.0, t=(0.5,)), np.array([1, 0]))
        assert deriv == pytest.approx(-2 * value)

    def test_atan2_derivative(self) -> None:
        """d/dx2 atan2(x2, x1) = x1 / (x1^2 + x2^2)."""
        _, deriv = eval_dual(parse_expr("atan2(x2,x1)"), at(1, 0), np.array([0, 0, 1]))
        assert deriv == pytest.approx(1.0)

    def test_fractional_power_of_negative_real(self) -> None:
        """Non-integer powers of negative reals use the magnitude."""
        assert eval_expr(parse_expr("pow(x1,0.5)"), at(-4.0)) == pytest.approx(2.0)

    def test_negative_power_at_zero(self) -> None:
        """Division by zero is a domain error naming the form."""
        with pytest.raises(DomainError) as exc_info:
            eval_expr(parse_expr("pow(x1,-1)"), at(0.0))
        assert exc_info.value.hyperplane == "x1"

    def test_log_at_zero(self) -> None:
        """The logarithm is excluded at zero."""
        with pytest.raises(DomainError):
            eval_expr(parse_expr("log(lin([1,-1]))"), at(1.0, 1.0))

    def test_unbound_quadrature(self) -> None:
        """Quadratures need a value."""
        with pytest.raises(InputError):
            eval_expr(parse_expr("quad(q)"), at(1.0))
        assert eval_expr(parse_expr("quad(q)"), at(1.0), {"q": 2.5}) == 2.5

    def test_direction_length_checked(self) -> None:
        """The tangent must cover (t, x)."""
        with pytest.raises(InputError):
            eval_dual(parse_expr("x1"), at(1.0), np.array([1.0]))

    def test_non_finite_point(self) -> None:
        """Points must be finite."""
        with pytest.raises(InputError):
            Point.of([0.0], [np.inf])

    def test_dual_matches_central_differences(self) -> None:
        """Forward-mode derivatives agree with central differences."""
        e = parse_expr("exp(x1*x2)*pow(lin([1,2]),-1) + pow(x1,3)*x2")
        t = np.zeros((3, 1))
        x = np.array([[0.5, 0.3], [1.2, -0.4], [-0.7, 0.9]])
        direction = np.array([0.3, -1.1])
        _, deriv = evaluate_dual(e, t, x, np.zeros(1), direction)
        h = 1e-6
        central = (evaluate(e, t, x + h * direction) - evaluate(e, t, x - h * direction)) / (2 * h)
        assert np.allclose(deriv, central, rtol=1e-6, atol=1e-8)


class TestHyperplanes:
    """Tests for excluded sets, safe sampling masks and crossing events."""

    def test_denominator_registers_real_plane(self) -> None:
        """A negative integer power of a real form excludes its zero set."""
        planes = collect_hyperplanes(parse_expr("pow(lin([0,0,1,-1]),2)*pow(x1,-2)"))
        assert [(p.kind, p.render()) for p in planes] == [(HyperplaneKind.REAL, "x1")]

    def test_atan2_registers_branch(self) -> None:
        """atan2 excludes the cut of den + i num."""
        planes = collect_hyperplanes(parse_expr("atan2(lin([0,1]),lin([1,0]))"))
        assert len(planes) == 1
        assert planes[0].kind is HyperplaneKind.BRANCH
        assert planes[0].render() == "lin([1,(0,1)])"

    def test_polynomial_has_no_planes(self) -> None:
        """Polynomials are defined everywhere."""
        assert collect_hyperplanes(parse_expr("pow(x1,2) + x2")) == ()

    def test_complex_state_uses_point_kind(self) -> None:
        """On complex states a reciprocal only excludes the point zero."""
        planes = collect_hyperplanes(parse_expr("pow(lin([1,1]),-1)"), real_state=False)
        assert planes[0].kind is HyperplaneKind.POINT

    def test_safe_mask(self) -> None:
        """Points within the margin of the plane are rejected."""
        planes = collect_hyperplanes(parse_expr("pow(x1,-1)"))
        mask = safe_mask(planes, np.zeros((2, 1)), np.array([[5e-4], [0.5]]), 1e-3)
        assert mask.tolist() == [False, True]

    def test_first_event(self) -> None:
        """The step after a sign change is reported."""
        planes = collect_hyperplanes(parse_expr("pow(x1,-1)"))
        states = np.array([[1.0], [0.5], [-0.5], [-1.0]])
        event = first_event(planes, np.zeros((4, 1)), states)
        assert event == (2, "x1")

    def test_no_event(self) -> None:
        """A trajectory that keeps its sign has no event."""
        planes = collect_hyperplanes(parse_expr("pow(x1,-1)"))
        states = np.array([[1.0], [2.0], [3.0]])
        assert first_event(planes, np.zeros((3, 1)), states) is None


class TestQuadratureAndLie:
    """Tests for accumulators and Lie derivatives."""

    def test_quadrature_value(self) -> None:
        """The integral of t from 0 to 2 is 2."""
        q = QuadratureSpec("q", (parse_expr("t1"),), (0.0,))
        assert q.values(np.array([[2.0]]))[0] == pytest.approx(2.0)
        assert q.rates(np.array([[2.0]]))[0, 0] == pytest.approx(2.0)

    def test_quadrature_of_exponential(self) -> None:
        """Integral of exp(t) from the anchor 1."""
        q = QuadratureSpec("q", (parse_expr("exp(t1)"),), (1.0,))
        assert q.values(np.array([[2.0]]))[0] == pytest.approx(np.e**2 - np.e)

    def test_lie_derivative_of_invariant(self, rotation_spec: SystemSpec) -> None:
        """x1^2 + x2^2 is constant along rotations."""
        e = parse_expr("pow(x1,2) + pow(x2,2)")
        assert abs(lie_derivative(e, rotation_spec, 0, at(0.3, -1.2))) < 1e-12

    def test_lie_derivative_of_coordinate(self, rotation_spec: SystemSpec) -> None:
        """The derivative of x1 is the first field component."""
        assert lie_derivative(parse_expr("x1"), rotation_spec, 0, at(1.0, 2.0)) == 2.0
