"""Tests for mesh construction, crack insertion and refinement."""

import numpy as np
import pytest
from scipy.sparse.csgraph import breadth_first_order

from src.core.errors import SegmentNotOnGrid, UnknownTag
from src.services.mesh import (
    BoundaryTag,
    boundary_edges,
    build_unit_square,
    cell_adjacency,
    insert_edge_crack,
    nearest_node,
    parse_tag,
    refine_global,
    tagged_nodes,
)


class TestBuildUnitSquare:
    """Test cases for the uniform unit-square grid."""

    def test_one_refinement(self):
        """Test n=1 gives 4 cells, 9 nodes and h=0.5."""
        mesh = build_unit_square(1)
        assert mesh.n_cells == 4
        assert mesh.n_nodes == 9
        assert mesh.h == pytest.approx(0.5)

    def test_unrefined_cell(self):
        """Test n=0 gives the single unit cell."""
        mesh = build_unit_square(0)
        assert mesh.n_cells == 1
        assert mesh.n_nodes == 4

    def test_seven_refinements(self):
        """Test n=7 gives 16384 cells with h=0.0078125."""
        mesh = build_unit_square(7)
        assert mesh.n_cells == 16384
        assert mesh.h == pytest.approx(0.0078125)

    def test_refinement_guard(self):
        """Test refinement levels beyond the memory guard are rejected."""
        with pytest.raises(ValueError):
            build_unit_square(13)
        with pytest.raises(ValueError):
            build_unit_square(-1)

    def test_cells_positive_and_cover_square(self):
        """Test every cell is counterclockwise and the areas sum to one."""
        areas = build_unit_square(3).cell_areas()
        assert np.all(areas > 0)
        assert areas.sum() == pytest.approx(1.0)

    def test_side_tags(self):
        """Test each side carries 2^n edges with the expected outward normal."""
        mesh = build_unit_square(2)
        expected = {
            BoundaryTag.G1: (0.0, -1.0),
            BoundaryTag.G2: (1.0, 0.0),
            BoundaryTag.G3: (0.0, 1.0),
            BoundaryTag.G4: (-1.0, 0.0),
        }
        for tag, normal in expected.items():
            edges = boundary_edges(mesh, tag)
            assert len(edges) == 4
            assert sum(e.length for e in edges) == pytest.approx(1.0)
            for edge in edges:
                np.testing.assert_allclose(edge.normal, normal, atol=1e-14)

    def test_bottom_nodes(self):
        """Test the nodes tagged G1 lie on y=0."""
        mesh = build_unit_square(2)
        nodes = tagged_nodes(mesh, "G1")
        assert nodes.size == 5
        np.testing.assert_allclose(mesh.nodes[nodes, 1], 0.0)

    def test_mesh_arrays_are_read_only(self):
        """Test the mesh cannot be mutated in place."""
        mesh = build_unit_square(1)
        with pytest.raises(ValueError):
            mesh.nodes[0, 0] = 3.0


class TestParseTag:
    """Test cases for boundary tag parsing."""

    def test_names_are_case_insensitive(self):
        """Test tag names parse regardless of case."""
        assert parse_tag("g3") is BoundaryTag.G3
        assert parse_tag(BoundaryTag.GC) is BoundaryTag.GC

    def test_unknown_tag(self):
        """Test unknown tag names raise UnknownTag."""
        with pytest.raises(UnknownTag):
            parse_tag("G5")

    def test_absent_tag_has_no_edges(self):
        """Test an uncracked mesh has no crack edges."""
        assert boundary_edges(build_unit_square(1), "GC") == []


class TestInsertEdgeCrack:
    """Test cases for node splitting along the slit."""

    def test_one_refinement_adds_boundary_copy(self):
        """Test n=1 only splits the right-boundary node."""
        base = build_unit_square(1)
        cracked = insert_edge_crack(base)
        assert cracked.n_nodes == base.n_nodes + 1

    def test_seven_refinements_add_sixty_four_nodes(self):
        """Test n=7 splits 63 interior nodes plus the boundary node."""
        base = build_unit_square(7)
        assert insert_edge_crack(base).n_nodes == base.n_nodes + 64

    def test_no_grid_line(self):
        """Test a mesh without a line at y=0.5 rejects the crack."""
        with pytest.raises(SegmentNotOnGrid):
            insert_edge_crack(build_unit_square(0))

    def test_tip_node_shared(self):
        """Test the tip node is not duplicated."""
        mesh = insert_edge_crack(build_unit_square(2))
        at_tip = np.all(np.isclose(mesh.nodes, [0.5, 0.5]), axis=1)
        assert at_tip.sum() == 1

    def test_duplicates_share_coordinates(self):
        """Test each copy sits on its original and belongs to lower cells only."""
        base = build_unit_square(2)
        mesh = insert_edge_crack(base)
        copies = np.arange(base.n_nodes, mesh.n_nodes)
        np.testing.assert_allclose(mesh.nodes[copies, 1], 0.5)
        np.testing.assert_allclose(mesh.nodes[copies, 0], [0.75, 1.0])

        owners = np.flatnonzero(np.isin(mesh.cells, copies).any(axis=1))
        assert np.all(mesh.cell_centroids()[owners, 1] < 0.5)

    def test_crack_faces(self):
        """Test both faces are tagged GC with total length twice the slit."""
        mesh = insert_edge_crack(build_unit_square(3))
        edges = boundary_edges(mesh, BoundaryTag.GC)
        assert len(edges) == 8
        assert sum(e.length for e in edges) == pytest.approx(1.0)
        normals = sorted(e.normal[1] for e in edges)
        assert normals[:4] == pytest.approx([-1.0] * 4)
        assert normals[4:] == pytest.approx([1.0] * 4)

    def test_cells_across_slit_not_adjacent(self):
        """Test the cell graph is cut along the crack only."""
        base = build_unit_square(1)
        assert cell_adjacency(base)[1, 3] == 1
        cracked = cell_adjacency(insert_edge_crack(base))
        assert cracked[1, 3] == 0
        assert cracked[0, 2] == 1

    @pytest.mark.parametrize("refinements", [1, 3, 5])
    def test_domain_connected_around_tip(self, refinements):
        """Test a breadth-first walk over the cut cell graph reaches every cell."""
        mesh = insert_edge_crack(build_unit_square(refinements))
        reached = breadth_first_order(
            cell_adjacency(mesh), 0, directed=False, return_predecessors=False
        )
        assert len(reached) == mesh.n_cells

    def test_double_crack_rejected(self):
        """Test a mesh cannot be cracked twice."""
        mesh = insert_edge_crack(build_unit_square(1))
        with pytest.raises(ValueError):
            insert_edge_crack(mesh)


class TestRefineGlobal:
    """Test cases for uniform quadrisection."""

    def test_refined_counts(self):
        """Test refining n=1 matches building n=2."""
        refined = refine_global(build_unit_square(1))
        assert refined.n_cells == 16
        assert refined.n_nodes == 25
        assert refined.h == pytest.approx(0.25)
        assert refined.refinement_level == 2
        assert refined.cell_areas().sum() == pytest.approx(1.0)

    def test_tags_follow_children(self):
        """Test every side keeps its length and doubles its edge count."""
        refined = refine_global(build_unit_square(1))
        for tag in (BoundaryTag.G1, BoundaryTag.G2, BoundaryTag.G3, BoundaryTag.G4):
            edges = boundary_edges(refined, tag)
            assert len(edges) == 4
            assert sum(e.length for e in edges) == pytest.approx(1.0)

    def test_crack_survives_refinement(self):
        """Test refining a cracked mesh keeps the slit open."""
        refined = refine_global(insert_edge_crack(build_unit_square(1)))
        direct = insert_edge_crack(build_unit_square(2))
        assert refined.n_nodes == direct.n_nodes
        crack_length = sum(e.length for e in boundary_edges(refined, "GC"))
        assert crack_length == pytest.approx(1.0)
        assert refined.crack is not None


class TestNearestNode:
    """Test cases for nearest-node lookup."""

    def test_bottom_center(self):
        """Test the bottom-center node is found."""
        mesh = build_unit_square(2)
        node = nearest_node(mesh, (0.5, 0.0))
        np.testing.assert_allclose(mesh.nodes[node], [0.5, 0.0])
