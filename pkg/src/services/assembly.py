"""Assembly of the Newton tangent, residual and boundary data for Q1 elements."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse as sp

from ..core.errors import SingularDensityFactor, UnknownTag
from .constitutive import (
    MaterialParams,
    SymTensor2,
    cauchy_stress,
    density_factor,
    elasticity_apply,
    strain,
)
from .fespace import FESpace, NodalField, VectorFunction, edge_gauss_rule
from .mesh import (
    BoundaryTag,
    TagLike,
    edge_geometry,
    nearest_node,
    parse_tag,
    tagged_nodes,
)

logger = logging.getLogger(__name__)

DirichletValue = Union[Tuple[float, float], VectorFunction]


@dataclass(frozen=True)
class DirichletSpec:
    """Constrained components (0 = u1, 1 = u2) and their prescribed value."""

    components: Tuple[int, ...]
    value: DirichletValue = (0.0, 0.0)


@dataclass(frozen=True)
class PointConstraint:
    """One component fixed at the node nearest to a point."""

    point: Tuple[float, float]
    component: int
    value: float = 0.0


@dataclass
class BoundaryConditions:
    """Dirichlet data per tag, tractions per tag and pinned points."""

    dirichlet: Dict[BoundaryTag, DirichletSpec] = field(default_factory=dict)
    neumann: Dict[BoundaryTag, Tuple[float, float]] = field(default_factory=dict)
    points: List[PointConstraint] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.dirichlet = {parse_tag(t): spec for t, spec in self.dirichlet.items()}
        self.neumann = {
            parse_tag(t): tuple(map(float, g)) for t, g in self.neumann.items()
        }
        if not self.dirichlet and not self.points:
            raise ValueError("At least one Dirichlet condition is required")
        for tag, spec in self.dirichlet.items():
            if not set(spec.components) <= {0, 1}:
                raise ValueError(f"Invalid components {spec.components} on {tag.value}")
            g = self.neumann.get(tag)
            if g is not None and any(g[c] != 0.0 for c in spec.components):
                raise ValueError(
                    f"Tag {tag.value} is both Dirichlet and Neumann in one component"
                )


@dataclass(frozen=True)
class DirichletConstraints:
    """Constrained global DOFs (sorted, unique) with their values."""

    dofs: np.ndarray
    values: np.ndarray

    def homogeneous(self) -> "DirichletConstraints":
        return DirichletConstraints(self.dofs, np.zeros_like(self.values))

    def impose(self, vector: np.ndarray) -> np.ndarray:
        out = np.array(vector, dtype=float, copy=True)
        out[self.dofs] = self.values
        return out


def build_constraints(space: FESpace, bcs: BoundaryConditions) -> DirichletConstraints:
    """Collect the DOFs and values prescribed by the boundary conditions."""
    mesh = space.mesh
    prescribed: Dict[int, float] = {}

    for tag, spec in bcs.dirichlet.items():
        nodes = tagged_nodes(mesh, tag)
        if nodes.size == 0:
            raise UnknownTag(f"Dirichlet tag {tag.value} has no edges on this mesh")
        if callable(spec.value):
            values = np.asarray(spec.value(mesh.nodes[nodes]), dtype=float)
            values = values.reshape(-1, 2)
        else:
            values = np.tile(np.asarray(spec.value, dtype=float), (nodes.size, 1))
        for comp in spec.components:
            for node, value in zip(nodes, values[:, comp]):
                prescribed[int(2 * node + comp)] = float(value)

    for pin in bcs.points:
        node = nearest_node(mesh, pin.point)
        prescribed[2 * node + pin.component] = pin.value

    dofs = np.array(sorted(prescribed), dtype=int)
    values = np.array([prescribed[d] for d in dofs], dtype=float)
    return DirichletConstraints(dofs, values)


def _quadrature_state(
    space: FESpace, u_n: NodalField, params: MaterialParams
) -> Tuple[SymTensor2, np.ndarray]:
    """Strain at every quadrature point and the checked density factor."""
    eps = strain(u_n.gradients(space.geometry))
    try:
        factor = density_factor(eps, params)
    except SingularDensityFactor as exc:
        cell, qp = exc.location
        location = {"cell": cell, "quadrature_point": qp}
        raise SingularDensityFactor(exc.value, location) from None
    return eps, np.broadcast_to(factor, eps.trace.shape)


def _scatter_vector(space: FESpace, local: np.ndarray) -> np.ndarray:
    """Sum element vectors (c, 8) into the global vector in cell order."""
    return np.bincount(
        space.dof_map.ravel(), weights=local.reshape(-1), minlength=space.n_dofs
    )


def assemble_tangent(
    space: FESpace, u_n: NodalField, params: MaterialParams
) -> sp.csr_matrix:
    """Tangent matrix A(u_n; phi_j, phi_i) of the Newton linearization."""
    geo = space.geometry
    grads = geo.gradients
    eps, factor = _quadrature_state(space, u_n, params)
    c1, c2, beta = params.c1, params.c2, params.beta

    w1 = geo.jxw / factor
    w2 = beta * geo.jxw / factor**2
    eye = np.eye(2)

    gram = np.einsum("cqan,cqbn->cqab", grads, grads)
    local = 0.5 * c1 * np.einsum("cq,cqab,ik->caibk", w1, gram, eye)
    local += 0.5 * c1 * np.einsum("cq,cqak,cqbi->caibk", w1, grads, grads)
    local += c2 * np.einsum("cq,cqai,cqbk->caibk", w1, grads, grads)
    if beta != 0.0:
        stress_lin = elasticity_apply(eps, params).as_matrix()
        weighted = np.einsum("cqin,cqan->cqai", stress_lin, grads)
        local -= np.einsum("cq,cqai,cqbk->caibk", w2, weighted, grads)

    n_cells = space.mesh.n_cells
    local = local.reshape(n_cells, 8, 8)
    rows = np.broadcast_to(space.dof_map[:, :, None], local.shape).ravel()
    cols = np.broadcast_to(space.dof_map[:, None, :], local.shape).ravel()
    shape = (space.n_dofs, space.n_dofs)
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=shape).tocsr()


def assemble_internal_force(
    space: FESpace, u_n: NodalField, params: MaterialParams
) -> np.ndarray:
    """Vector of int T(u_n) : eps(phi_i) dx."""
    geo = space.geometry
    eps, _ = _quadrature_state(space, u_n, params)
    stress = cauchy_stress(eps, params).as_matrix()
    local = np.einsum("cq,cqij,cqaj->cai", geo.jxw, stress, geo.gradients)
    return _scatter_vector(space, local)


def assemble_traction(space: FESpace, tag: TagLike, g: Sequence[float]) -> np.ndarray:
    """Consistent load vector of a constant traction g on the tagged edges."""
    mesh = space.mesh
    faces = mesh.boundary_faces.get(parse_tag(tag))
    if faces is None or faces.size == 0:
        raise UnknownTag(f"Tag {parse_tag(tag).value} has no edges on this mesh")

    ends, lengths, _ = edge_geometry(mesh, faces)
    rule = edge_gauss_rule(2)
    shape = np.column_stack([1.0 - rule.points, rule.points])
    edge_weights = lengths[:, None] * (rule.weights @ shape)[None, :]

    traction = np.asarray(g, dtype=float)
    out = np.zeros(space.n_dofs)
    for comp in (0, 1):
        out += np.bincount(
            (2 * ends + comp).ravel(),
            weights=(edge_weights * traction[comp]).ravel(),
            minlength=space.n_dofs,
        )
    return out


def assemble_body_force(space: FESpace, body_force: VectorFunction) -> np.ndarray:
    """Load vector of int f . phi_i dx with f evaluated at quadrature points."""
    geo = space.geometry
    points = geo.points.reshape(-1, 2)
    values = np.asarray(body_force(points), dtype=float).reshape(geo.points.shape)
    local = np.einsum("cq,cqi,qa->cai", geo.jxw, values, geo.shape_values)
    return _scatter_vector(space, local)


def assemble_loads(
    space: FESpace,
    bcs: BoundaryConditions,
    body_force: Optional[VectorFunction] = None,
) -> np.ndarray:
    """Neumann tractions plus the optional body force."""
    loads = np.zeros(space.n_dofs)
    for tag, g in bcs.neumann.items():
        if any(g):
            loads += assemble_traction(space, tag, g)
    if body_force is not None:
        loads += assemble_body_force(space, body_force)
    return loads


def assemble_residual(
    space: FESpace,
    u_n: NodalField,
    params: MaterialParams,
    bcs: BoundaryConditions,
    body_force: Optional[VectorFunction] = None,
) -> np.ndarray:
    """Right-hand side L(u_n; phi_i): loads minus internal force."""
    loads = assemble_loads(space, bcs, body_force)
    return loads - assemble_internal_force(space, u_n, params)


def apply_dirichlet(
    matrix: sp.spmatrix, vector: np.ndarray, constraints: DirichletConstraints
) -> Tuple[sp.csr_matrix, np.ndarray]:
    """Eliminate constrained DOFs: identity rows and columns, values in the rhs."""
    n = matrix.shape[0]
    prescribed = np.zeros(n)
    prescribed[constraints.dofs] = constraints.values
    rhs = np.asarray(vector, dtype=float) - matrix @ prescribed

    keep = np.ones(n)
    keep[constraints.dofs] = 0.0
    mask = sp.diags(keep)
    reduced = (mask @ matrix @ mask + sp.diags(1.0 - keep)).tocsr()

    rhs[constraints.dofs] = constraints.values
    return reduced, rhs
