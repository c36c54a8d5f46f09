"""Q1 bilinear vector finite-element space on quadrilateral meshes."""

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from ..core.errors import DegenerateCell
from .mesh import Mesh

# Reference vertices, counterclockwise, matching the cell node order.
REFERENCE_VERTICES = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
JACOBIAN_TOLERANCE = 1e-14

VectorFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureRule:
    """Points in [-1,1]^d and matching weights."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.size)


def gauss_rule(n_points: int) -> QuadratureRule:
    """Tensor-product Gauss-Legendre rule on the reference square."""
    pts, wts = np.polynomial.legendre.leggauss(n_points)
    xi, eta = np.meshgrid(pts, pts)
    wx, wy = np.meshgrid(wts, wts)
    return QuadratureRule(np.column_stack([xi.ravel(), eta.ravel()]), (wx * wy).ravel())


def edge_gauss_rule(n_points: int = 2) -> QuadratureRule:
    """Gauss-Legendre rule mapped to the unit interval [0, 1]."""
    pts, wts = np.polynomial.legendre.leggauss(n_points)
    return QuadratureRule(0.5 * (pts + 1.0), 0.5 * wts)


def shape_eval(ref_point: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Q1 shape values (..., 4) and reference gradients (..., 4, 2)."""
    ref = np.asarray(ref_point, dtype=float)
    xi = ref[..., 0, None]
    eta = ref[..., 1, None]
    xa, ya = REFERENCE_VERTICES[:, 0], REFERENCE_VERTICES[:, 1]

    values = 0.25 * (1.0 + xa * xi) * (1.0 + ya * eta)
    d_xi = 0.25 * xa * (1.0 + ya * eta)
    d_eta = 0.25 * ya * (1.0 + xa * xi)
    return values, np.stack([d_xi, d_eta], axis=-1)


def _map_gradients(
    coords: np.ndarray, ref_grads: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Physical gradients (c, q, 4, 2) and det J (c, q) for cells (c, 4, 2)."""
    jac = np.einsum("cai,qaj->cqij", coords, ref_grads)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]

    bad = np.flatnonzero((det <= JACOBIAN_TOLERANCE).any(axis=1))
    if bad.size:
        cell = int(bad[0])
        raise DegenerateCell(cell, float(det[cell].min()))

    inv = np.empty_like(jac)
    inv[..., 0, 0] = jac[..., 1, 1]
    inv[..., 0, 1] = -jac[..., 0, 1]
    inv[..., 1, 0] = -jac[..., 1, 0]
    inv[..., 1, 1] = jac[..., 0, 0]
    inv /= det[..., None, None]
    return np.einsum("qaj,cqji->cqai", ref_grads, inv), det


def physical_gradients(
    cell_coords: np.ndarray, ref_point: np.ndarray
) -> Tuple[np.ndarray, float]:
    """Shape gradients in physical coordinates for one cell at one point."""
    _, ref_grads = shape_eval(np.asarray(ref_point, dtype=float)[None, :])
    grads, det = _map_gradients(np.asarray(cell_coords, dtype=float)[None], ref_grads)
    return grads[0, 0], float(det[0, 0])


@dataclass
class CellGeometry:
    """Per-cell quadrature data for one rule."""

    rule: QuadratureRule
    shape_values: np.ndarray  # (q, 4)
    gradients: np.ndarray  # (c, q, 4, 2)
    jxw: np.ndarray  # (c, q) det J times weight
    points: np.ndarray  # (c, q, 2) physical quadrature points


@dataclass
class FESpace:
    """Continuous Q1 vector space; DOFs are node-major, component-minor."""

    mesh: Mesh
    dof_map: np.ndarray = field(init=False)
    geometry: CellGeometry = field(init=False)

    def __post_init__(self) -> None:
        cells = self.mesh.cells
        self.dof_map = np.stack([2 * cells, 2 * cells + 1], axis=-1).reshape(-1, 8)
        self.geometry = self.cell_geometry(gauss_rule(2))

    @property
    def n_dofs(self) -> int:
        return 2 * self.mesh.n_nodes

    def cell_geometry(self, rule: QuadratureRule) -> CellGeometry:
        values, ref_grads = shape_eval(rule.points)
        coords = self.mesh.cell_coordinates()
        grads, det = _map_gradients(coords, ref_grads)
        points = np.einsum("qa,cai->cqi", values, coords)
        return CellGeometry(rule, values, grads, det * rule.weights, points)


def build_q1_space(mesh: Mesh) -> FESpace:
    """Q1 space whose continuity is broken only where the mesh splits nodes."""
    return FESpace(mesh)


@dataclass
class NodalField:
    """Displacement vector per mesh node, shape (n_nodes, 2)."""

    space: FESpace
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.space.mesh.n_nodes, 2)
        if self.values.shape != expected:
            raise ValueError(
                f"Field shape {self.values.shape} does not match {expected}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Field contains non-finite values")

    @classmethod
    def from_vector(cls, space: FESpace, vector: np.ndarray) -> "NodalField":
        return cls(space, np.asarray(vector, dtype=float).reshape(-1, 2))

    @classmethod
    def zeros(cls, space: FESpace) -> "NodalField":
        return cls(space, np.zeros((space.mesh.n_nodes, 2)))

    def as_vector(self) -> np.ndarray:
        return self.values.reshape(-1).copy()

    def gradients(self, geometry: CellGeometry) -> np.ndarray:
        """Displacement gradients du_i/dx_j at quadrature points, (c, q, 2, 2)."""
        local = self.values[self.space.mesh.cells]
        return np.einsum("cai,cqaj->cqij", local, geometry.gradients)

    def at_quadrature(self, geometry: CellGeometry) -> np.ndarray:
        """Field values at quadrature points, (c, q, 2)."""
        local = self.values[self.space.mesh.cells]
        return np.einsum("qa,cai->cqi", geometry.shape_values, local)

    def evaluate(self, cell: int, ref_point: np.ndarray) -> np.ndarray:
        """Field value inside one cell at a reference point."""
        values, _ = shape_eval(ref_point)
        return values @ self.values[self.space.mesh.cells[cell]]


def interpolate(space: FESpace, f: VectorFunction) -> NodalField:
    """Nodal interpolant of a vectorized function f(points (n, 2)) -> (n, 2)."""
    values = np.asarray(f(space.mesh.nodes), dtype=float)
    return NodalField(space, np.broadcast_to(values, (space.mesh.n_nodes, 2)).copy())
