"""Tests for system documents, R-linear embedding, solvability and sampling."""

import json
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from firstint.expr import collect_hyperplanes, parse_expr
from firstint.systems import (
    FieldKind,
    SystemKind,
    SystemSpec,
    conjugation_defect,
    default_grid,
    embed_rlinear,
    embed_state,
    forcing_compat_check,
    frobenius_check,
    parse_spec,
    random_points,
    safe_points,
    state_directions,
)
from firstint.systems.spec import RLINEAR_FORCING_UNSUPPORTED
from firstint.utils.exceptions import ConfigurationError, DomainError, InputError


def read_document(specs_dir: Path, name: str) -> dict[str, Any]:
    return json.loads((specs_dir / f"{name}.json").read_text())


class TestParseSpec:
    """Tests for document validation."""

    def test_minimal_ode(self) -> None:
        """A one-dimensional ODE needs only kind, n and matrices."""
        spec = parse_spec('{"kind": "ode", "n": 1, "matrices": [[[0]]]}')
        assert (spec.kind, spec.n, spec.m) == (SystemKind.ODE, 1, 1)
        assert spec.field is FieldKind.REAL
        assert not spec.is_forced

    def test_complex_entries(self) -> None:
        """[re, im] pairs make a complex system."""
        spec = parse_spec({"kind": "ode", "n": 1, "matrices": [[[[0, 1]]]]})
        assert spec.field is FieldKind.COMPLEX
        assert spec.matrices[0][0, 0] == 1j

    def test_operator_convention_is_transposed(self) -> None:
        """Operator matrices are stored as field matrices."""
        spec = parse_spec(
            {"kind": "ode", "n": 2, "matrices": [[[0, 1], [0, 0]]], "convention": "operator"}
        )
        assert np.array_equal(spec.matrices[0], np.array([[0, 0], [1, 0]]))
        assert np.array_equal(spec.operators[0], np.array([[0, 1], [0, 0]]))

    def test_m_is_inferred(self, total_2_3: SystemSpec) -> None:
        """Total systems take m from the number of matrices."""
        assert total_2_3.m == 2
        assert total_2_3.directions == 2
        assert len(total_2_3.references) == 2

    @pytest.mark.parametrize(
        ("document", "pointer"),
        [
            ({"kind": "ode", "n": 0, "matrices": [[[0]]]}, "/n"),
            ({"kind": "ode", "n": 1, "matrices": [[[0]]], "bogus": 1}, "/bogus"),
            ({"kind": "ode", "n": 2, "matrices": [[[1, 0], [0]]]}, "/matrices/0/1"),
            ({"kind": "ode", "n": 2, "matrices": [[[1, 0]]]}, "/matrices/0"),
            ({"kind": "ode", "n": 1, "matrices": [[[0]], [[1]]]}, "/m"),
            ({"kind": "total", "n": 1, "m": 2, "matrices": [[[0]]]}, "/matrices"),
            ({"kind": "total", "n": 1}, "/matrices"),
            ({"kind": "ode", "n": 1, "matrices": [[[0]]], "rlinear_coeffs": []}, "/rlinear_coeffs"),
            ({"kind": "rlinear", "n": 1}, "/rlinear_coeffs"),
        ],
    )
    def test_invalid_documents(self, document: dict[str, Any], pointer: str) -> None:
        """Each contract violation is reported with its location."""
        with pytest.raises(InputError) as exc_info:
            parse_spec(document)
        assert exc_info.value.pointer == pointer

    def test_invalid_json(self) -> None:
        """Undecodable text is an input error at the root."""
        with pytest.raises(InputError) as exc_info:
            parse_spec("{not json")
        assert exc_info.value.pointer == ""

    def test_root_must_be_object(self) -> None:
        """Arrays are not documents."""
        with pytest.raises(InputError):
            parse_spec("[1, 2]")

    def test_forcing_must_be_time_only(self) -> None:
        """Forcing may not mention the state."""
        document = {"kind": "ode", "n": 1, "matrices": [[[0]]], "forcing": [["x1"]]}
        with pytest.raises(InputError) as exc_info:
            parse_spec(document)
        assert exc_info.value.pointer == "/forcing/0/0"

    def test_forcing_component_count(self) -> None:
        """Every forcing term has n components."""
        document = {"kind": "ode", "n": 2, "matrices": [[[0, 0], [0, 0]]], "forcing": [["1"]]}
        with pytest.raises(InputError) as exc_info:
            parse_spec(document)
        assert exc_info.value.pointer == "/forcing/0"

    def test_bad_reference(self) -> None:
        """References are parsed with their own pointer."""
        document = {"kind": "ode", "n": 1, "matrices": [[[0]]], "reference": ["x1", "lin(["]}
        with pytest.raises(InputError) as exc_info:
            parse_spec(document)
        assert exc_info.value.pointer == "/reference/1"

    def test_yaml_document(self, tmp_path: Path) -> None:
        """YAML files load like JSON ones."""
        path = tmp_path / "rotation.yaml"
        path.write_text("kind: ode\nn: 2\nmatrices:\n  - [[0, 1], [-1, 0]]\n")
        spec = SystemSpec.from_file(path)
        assert spec.n == 2

    def test_missing_file(self, tmp_path: Path) -> None:
        """Unreadable documents are configuration errors."""
        with pytest.raises(ConfigurationError):
            SystemSpec.from_file(tmp_path / "missing.json")

    def test_unsupported_suffix(self, tmp_path: Path) -> None:
        """Only JSON and YAML are accepted."""
        path = tmp_path / "system.txt"
        path.write_text("{}")
        with pytest.raises(ConfigurationError):
            SystemSpec.from_file(path)

    def test_all_shipped_specs_load(self, specs_dir: Path) -> None:
        """Every example document is valid."""
        paths = sorted(specs_dir.glob("*.json"))
        assert len(paths) >= 10
        for path in paths:
            SystemSpec.from_file(path)


class TestRLinear:
    """Tests for the embedding of R-linear systems."""

    def test_holomorphic_scalar(self) -> None:
        """dw = w dz embeds as dw = w dz, d(conj w) = conj(w) d(conj z)."""
        spec = parse_spec(
            {"kind": "rlinear", "n": 1, "m": 1, "rlinear_coeffs": [[[1, 0], [0, 0]]]}
        )
        assert spec.state_dim == 2
        assert spec.directions == 2
        assert np.allclose(spec.matrices[0], [[1, 0], [0, 0]])
        assert np.allclose(spec.matrices[1], [[0, 0], [0, 1]])
        along_re, along_im = spec.direction_matrices
        assert np.allclose(along_re, np.eye(2))
        assert np.allclose(along_im, np.diag([1j, -1j]))

    def test_conjugation_is_preserved(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """The generators map embedded states to embedded tangents."""
        spec = load_spec("sys_1_18")
        assert spec.kind is SystemKind.RLINEAR
        assert (spec.n, spec.m, spec.state_dim) == (3, 1, 6)
        rng = np.random.default_rng(3)
        w = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
        gamma = embed_state(w)
        assert conjugation_defect(gamma, 3) == 0.0
        for j in range(spec.directions):
            tangent = spec.vector_field(j, np.zeros((5, 2)), gamma)
            assert conjugation_defect(tangent, 3) < 1e-12

    def test_embed_conjugate_linear(self) -> None:
        """dw = (2i w + conj(w)) dz puts the conjugated, swapped row under dz-bar."""
        spec = embed_rlinear(
            {"n": 1, "m": 1, "coefficients": [[[[0, 2], 1], [0, 0]]]},
            references=["x1*x2"],
            name="conjugate",
        )
        assert spec.field is FieldKind.COMPLEX
        assert spec.name == "conjugate"
        assert spec.reference_text == ("x1*x2",)
        assert np.allclose(spec.matrices[0], [[2j, 1], [0, 0]])
        assert np.allclose(spec.matrices[1], [[0, 0], [1, -2j]])

    def test_wrong_tensor_shape(self) -> None:
        """Each equation needs 2m rows of 2n coefficients."""
        with pytest.raises(InputError) as exc_info:
            parse_spec({"kind": "rlinear", "n": 1, "m": 1, "rlinear_coeffs": [[[1, 0]]]})
        assert exc_info.value.pointer == "/rlinear_coeffs/0"

    def test_forcing_rejected(self) -> None:
        """R-linear systems are homogeneous."""
        document = {
            "kind": "rlinear",
            "n": 1,
            "rlinear_coeffs": [[[1, 0], [0, 0]]],
            "forcing": [["1"]],
        }
        with pytest.raises(InputError) as info:
            parse_spec(document)
        assert info.value.pointer == "/forcing"
        assert str(info.value) == RLINEAR_FORCING_UNSUPPORTED
        assert "total system on 2n unknowns" in str(info.value)


class TestFrobenius:
    """Tests for complete solvability."""

    def test_ode_is_solvable(self, ode_3_2: SystemSpec) -> None:
        """A single matrix has no commutators."""
        verdict = frobenius_check(ode_3_2)
        assert verdict.solvable
        assert verdict.max_commutator_residual == 0.0

    def test_commuting_total_system(self, total_2_3: SystemSpec) -> None:
        """Commuting matrices pass."""
        verdict = frobenius_check(total_2_3)
        assert verdict.solvable
        assert verdict.offending_pair is None
        assert verdict.defect_witness is None

    def test_non_commuting_system(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """The defect witness is the bracket of the offending pair."""
        spec = load_spec("sys_2_38")
        verdict = frobenius_check(spec)
        assert not verdict.solvable
        assert verdict.offending_pair == (0, 1)
        m1, m2 = spec.matrices
        assert np.allclose(verdict.defect_witness, m2 @ m1 - m1 @ m2)
        assert verdict.to_dict()["offending_pair"] == [0, 1]

    def test_compatible_forcing(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """The forced example satisfies the compatibility conditions."""
        verdict = frobenius_check(load_spec("forced_2_2"))
        assert verdict.solvable
        assert verdict.forcing_residual is not None
        assert verdict.forcing_residual < 1e-6
        assert len(verdict.grid) == 25

    def test_incompatible_forcing(self, specs_dir: Path) -> None:
        """A perturbed forcing breaks compatibility."""
        document = read_document(specs_dir, "forced_2_2")
        document["forcing"][0][2] = "t2 - t1 + t1*t1"
        spec = parse_spec(document)
        assert forcing_compat_check(spec, default_grid(2)) > 0.1
        assert not frobenius_check(spec).solvable

    def test_dropped_forcing_component(self, specs_dir: Path) -> None:
        """Without the constant second component the conditions fail by 1."""
        document = read_document(specs_dir, "forced_2_2")
        document["forcing"][0][1] = "0"
        spec = parse_spec(document)
        assert forcing_compat_check(spec, default_grid(2)) == pytest.approx(1.0, abs=1e-5)

    def test_compat_check_needs_forcing(self, total_2_3: SystemSpec) -> None:
        """Homogeneous systems have nothing to check."""
        with pytest.raises(InputError):
            forcing_compat_check(total_2_3, default_grid(2))

    def test_compat_check_rejects_rlinear(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """Forced R-linear systems are refused with the same message as the parser."""
        spec = load_spec("sys_1_18")
        zero = parse_expr("0")
        forced = replace(spec, forcing=tuple((zero,) * spec.state_dim for _ in range(2)))
        with pytest.raises(InputError) as info:
            forcing_compat_check(forced, default_grid(2))
        assert str(info.value) == RLINEAR_FORCING_UNSUPPORTED

    def test_grid_dimension_checked(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """Grid points need one coordinate per variable."""
        with pytest.raises(InputError):
            forcing_compat_check(load_spec("forced_2_2"), np.zeros((3, 1)))

    def test_default_grid(self) -> None:
        """Five points per axis on [-1, 1]."""
        grid = default_grid(2)
        assert grid.shape == (25, 2)
        assert grid.min() == -1.0 and grid.max() == 1.0


class TestSampling:
    """Tests for seeded point sampling."""

    def test_random_point_shapes(self, total_2_3: SystemSpec, rng: np.random.Generator) -> None:
        """Times and states match the system dimensions."""
        t, x = random_points(total_2_3, rng, 7)
        assert t.shape == (7, 2)
        assert x.shape == (7, 4)
        assert np.all(np.abs(x) <= 2.0)

    def test_rlinear_points_are_embedded(
        self, load_spec: Callable[[str], SystemSpec], rng: np.random.Generator
    ) -> None:
        """R-linear states come as (w, conj(w))."""
        _, x = random_points(load_spec("sys_1_18"), rng, 10)
        assert conjugation_defect(x, 3) == 0.0

    def test_safe_points_avoid_planes(
        self, rotation_spec: SystemSpec, rng: np.random.Generator
    ) -> None:
        """Rejected points are replaced until the count is reached."""
        planes = collect_hyperplanes(parse_expr("pow(x1,-1)"))
        _, x = safe_points(rotation_spec, planes, 50, rng, margin=0.5)
        assert x.shape == (50, 2)
        assert np.all(np.abs(x[:, 0].real) > 0.5)

    def test_safe_points_exhausted(
        self, rotation_spec: SystemSpec, rng: np.random.Generator
    ) -> None:
        """A margin wider than the box leaves nothing to sample."""
        planes = collect_hyperplanes(parse_expr("pow(x1,-1)"))
        with pytest.raises(DomainError):
            safe_points(rotation_spec, planes, 5, rng, margin=5.0)

    def test_seeded_sampling_is_deterministic(self, total_2_3: SystemSpec) -> None:
        """Equal seeds give equal points."""
        first = random_points(total_2_3, np.random.default_rng(1), 4)
        second = random_points(total_2_3, np.random.default_rng(1), 4)
        assert np.array_equal(first[1], second[1])

    def test_state_directions(self, load_spec: Callable[[str], SystemSpec]) -> None:
        """R-linear systems have 2n real state directions."""
        directions = state_directions(load_spec("sys_1_18"))
        assert len(directions) == 6
        assert np.allclose(directions[3], [1j, 0, 0, -1j, 0, 0])
