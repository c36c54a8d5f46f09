"""Tests for the Q1 finite-element space."""

import numpy as np
import pytest

from src.core.errors import DegenerateCell
from src.services.fespace import (
    FESpace,
    NodalField,
    build_q1_space,
    edge_gauss_rule,
    gauss_rule,
    interpolate,
    physical_gradients,
    shape_eval,
)
from src.services.mesh import Mesh, build_unit_square, insert_edge_crack


class TestQuadrature:
    """Test cases for Gauss-Legendre rules."""

    def test_square_rule_weights(self):
        """Test the 2x2 and 3x3 rules integrate one over the reference square."""
        assert gauss_rule(2).weights.sum() == pytest.approx(4.0)
        assert gauss_rule(3).size == 9

    def test_edge_rule_integrates_cubics(self):
        """Test the two-point edge rule is exact for cubics on [0, 1]."""
        rule = edge_gauss_rule(2)
        assert rule.weights.sum() == pytest.approx(1.0)
        assert np.dot(rule.weights, rule.points**3) == pytest.approx(0.25)

    @pytest.mark.parametrize("p", range(4))
    @pytest.mark.parametrize("q", range(4))
    def test_cell_rule_integrates_bicubics(self, p, q):
        """Test the 2x2 rule integrates xi^p eta^q exactly on the reference square."""
        rule = gauss_rule(2)

        def exact(k):
            return 0.0 if k % 2 else 2.0 / (k + 1)

        value = np.dot(rule.weights, rule.points[:, 0] ** p * rule.points[:, 1] ** q)
        assert value == pytest.approx(exact(p) * exact(q), abs=1e-15)


class TestShapeFunctions:
    """Test cases for bilinear shape functions."""

    def test_partition_of_unity(self):
        """Test values sum to one and gradients to zero."""
        points = np.array([[0.3, -0.7], [0.0, 0.0], [1.0, 1.0]])
        values, grads = shape_eval(points)
        np.testing.assert_allclose(values.sum(axis=-1), 1.0)
        np.testing.assert_allclose(grads.sum(axis=-2), 0.0, atol=1e-15)

    def test_kronecker_property(self):
        """Test each function is one at its own vertex."""
        vertices = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
        values, _ = shape_eval(vertices)
        np.testing.assert_allclose(values, np.eye(4), atol=1e-15)

    def test_physical_gradients_on_scaled_cell(self):
        """Test gradients scale with the cell size."""
        coords = np.array([[0.0, 0.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]])
        grads, det = physical_gradients(coords, np.array([0.0, 0.0]))
        assert det == pytest.approx(0.0625)
        np.testing.assert_allclose(grads[0], [-1.0, -1.0])


class TestFESpace:
    """Test cases for the vector Q1 space."""

    def test_dof_layout(self):
        """Test DOFs are node-major, component-minor."""
        space = build_q1_space(build_unit_square(1))
        assert space.n_dofs == 18
        np.testing.assert_array_equal(space.dof_map[0], [0, 1, 2, 3, 8, 9, 6, 7])

    def test_jacobian_weights_sum_to_area(self):
        """Test the quadrature weights integrate the domain area."""
        space = build_q1_space(build_unit_square(2))
        assert space.geometry.jxw.sum() == pytest.approx(1.0)

    def test_degenerate_cell(self):
        """Test a clockwise cell raises DegenerateCell."""
        nodes = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]])
        mesh = Mesh(nodes, np.array([[0, 1, 2, 3]]), {})
        with pytest.raises(DegenerateCell) as excinfo:
            FESpace(mesh)
        assert excinfo.value.cell == 0

    def test_crack_space_has_extra_dofs(self):
        """Test duplicated nodes carry their own DOFs."""
        base = build_unit_square(2)
        space = build_q1_space(insert_edge_crack(base))
        assert space.n_dofs == 2 * (base.n_nodes + 2)


class TestNodalField:
    """Test cases for nodal displacement fields."""

    def test_linear_field_gradient(self):
        """Test u = (x, 0) has gradient e1 x e1 at every quadrature point."""
        space = build_q1_space(build_unit_square(2))
        u = interpolate(space, lambda p: np.column_stack([p[:, 0], np.zeros(len(p))]))
        grads = u.gradients(space.geometry)
        expected = np.zeros_like(grads)
        expected[..., 0, 0] = 1.0
        np.testing.assert_allclose(grads, expected, atol=1e-13)

    def test_evaluate_at_center(self):
        """Test the cell-center value of a bilinear field."""
        space = build_q1_space(build_unit_square(0))
        u = interpolate(
            space, lambda p: np.column_stack([p[:, 0] * p[:, 1], p[:, 0] + p[:, 1]])
        )
        np.testing.assert_allclose(u.evaluate(0, np.array([0.0, 0.0])), [0.25, 1.0])

    @pytest.mark.parametrize("cracked", [False, True])
    def test_bilinear_field_reproduced_inside_cells(self, cracked):
        """Test any bilinear field is reproduced at arbitrary interior points."""
        mesh = build_unit_square(2)
        space = build_q1_space(insert_edge_crack(mesh) if cracked else mesh)

        def field(p):
            x, y = p[..., 0], p[..., 1]
            first = 1.0 + 2.0 * x - 3.0 * y + 4.0 * x * y
            second = -x + 0.5 * y + x * y
            return np.stack([first, second], axis=-1)

        u = interpolate(space, field)
        rng = np.random.default_rng(3)
        for cell in range(space.mesh.n_cells):
            ref = rng.uniform(-1.0, 1.0, size=2)
            values, _ = shape_eval(ref)
            point = values @ space.mesh.nodes[space.mesh.cells[cell]]
            np.testing.assert_allclose(
                u.evaluate(cell, ref), field(point), rtol=0, atol=1e-13
            )

    def test_vector_round_trip_layout(self):
        """Test the global vector interleaves components per node."""
        space = build_q1_space(build_unit_square(0))
        u = NodalField.from_vector(space, np.arange(8.0))
        np.testing.assert_array_equal(u.values[1], [2.0, 3.0])

    def test_shape_mismatch(self):
        """Test wrongly shaped data is rejected."""
        space = build_q1_space(build_unit_square(0))
        with pytest.raises(ValueError):
            NodalField(space, np.zeros((3, 2)))

    def test_non_finite_values(self):
        """Test NaN entries are rejected."""
        space = build_q1_space(build_unit_square(0))
        values = np.zeros((4, 2))
        values[0, 0] = np.nan
        with pytest.raises(ValueError):
            NodalField(space, values)
