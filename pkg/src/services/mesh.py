"""Structured quadrilateral meshes of the unit square with an optional edge crack."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from ..config.settings import Config
from ..core.errors import SegmentNotOnGrid, UnknownTag

logger = logging.getLogger(__name__)

# Local edge k of a counterclockwise cell runs from vertex k to vertex k+1.
EDGE_VERTICES = np.array([[0, 1], [1, 2], [2, 3], [3, 0]])


class BoundaryTag(str, Enum):
    """Edge tags: the four sides of the unit square and the crack faces."""

    G1 = "G1"  # bottom, y = 0
    G2 = "G2"  # right, x = 1
    G3 = "G3"  # top, y = 1
    G4 = "G4"  # left, x = 0
    GC = "GC"  # crack faces


TagLike = Union[BoundaryTag, str]


def parse_tag(tag: TagLike) -> BoundaryTag:
    """Return the BoundaryTag for a tag or its name, raising UnknownTag."""
    if isinstance(tag, BoundaryTag):
        return tag
    try:
        return BoundaryTag(str(tag).strip().upper())
    except ValueError:
        raise UnknownTag(f"Unknown boundary tag: {tag!r}") from None


@dataclass(frozen=True)
class CrackSpec:
    """Straight horizontal slit y = const from the tip to the end point."""

    y: float = Config.CRACK_Y
    tip_x: float = Config.CRACK_TIP_X
    end_x: float = Config.CRACK_END_X

    @property
    def length(self) -> float:
        return abs(self.end_x - self.tip_x)

    @property
    def tip(self) -> Tuple[float, float]:
        return (self.tip_x, self.y)


class BoundaryEdge(NamedTuple):
    """A tagged cell edge with its length and outward unit normal."""

    cell: int
    local_edge: int
    length: float
    normal: Tuple[float, float]


@dataclass(frozen=True)
class Mesh:
    """Quadrilateral mesh; cells list four node indices counterclockwise."""

    nodes: np.ndarray
    cells: np.ndarray
    boundary_faces: Dict[BoundaryTag, np.ndarray]
    crack: Optional[CrackSpec] = None
    refinement_level: int = 0

    def __post_init__(self) -> None:
        self.nodes.setflags(write=False)
        self.cells.setflags(write=False)
        for faces in self.boundary_faces.values():
            faces.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    @property
    def h(self) -> float:
        """Largest edge length of the mesh."""
        ends = self.nodes[self.cells[:, EDGE_VERTICES]]
        return float(np.linalg.norm(ends[..., 1, :] - ends[..., 0, :], axis=-1).max())

    def cell_coordinates(self) -> np.ndarray:
        """Vertex coordinates per cell, shape (n_cells, 4, 2)."""
        return self.nodes[self.cells]

    def cell_areas(self) -> np.ndarray:
        xy = self.cell_coordinates()
        x, y = xy[..., 0], xy[..., 1]
        cross = x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y
        return 0.5 * np.sum(cross, axis=1)

    def cell_centroids(self) -> np.ndarray:
        return self.cell_coordinates().mean(axis=1)


def build_unit_square(n_refinements: int) -> Mesh:
    """Uniform 2^n x 2^n grid of [0,1]^2 with the four sides tagged."""
    if not 0 <= n_refinements <= Config.MAX_REFINEMENTS:
        raise ValueError(
            f"n_refinements must lie in [0, {Config.MAX_REFINEMENTS}], "
            f"got {n_refinements}"
        )

    n = 2**n_refinements
    coords = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(coords, coords)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])

    ii, jj = np.meshgrid(np.arange(n), np.arange(n))
    ii, jj = ii.ravel(), jj.ravel()
    corner = jj * (n + 1) + ii
    cells = np.column_stack([corner, corner + 1, corner + n + 2, corner + n + 1])

    def side(mask: np.ndarray, local_edge: int) -> np.ndarray:
        ids = np.flatnonzero(mask)
        return np.column_stack([ids, np.full(ids.size, local_edge)])

    faces = {
        BoundaryTag.G1: side(jj == 0, 0),
        BoundaryTag.G2: side(ii == n - 1, 1),
        BoundaryTag.G3: side(jj == n - 1, 2),
        BoundaryTag.G4: side(ii == 0, 3),
    }

    logger.info(
        "Built unit square mesh: %d cells, %d nodes, h=%g",
        n * n,
        nodes.shape[0],
        1.0 / n,
    )
    return Mesh(nodes, cells, faces, crack=None, refinement_level=n_refinements)


def _crack_face_masks(mesh: Mesh, crack: CrackSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Masks (n_cells, 4) of edges on the slit, for cells above and below it."""
    tol = Config.GEOMETRY_TOLERANCE
    ends = mesh.nodes[mesh.cells[:, EDGE_VERTICES]]
    on_line = np.abs(ends[..., 0, 1] - crack.y) < tol
    on_line &= np.abs(ends[..., 1, 1] - crack.y) < tol
    x_lo = ends[..., 0].min(axis=-1)
    x_hi = ends[..., 0].max(axis=-1)
    on_segment = on_line & (x_lo >= min(crack.tip_x, crack.end_x) - tol)
    on_segment &= x_hi <= max(crack.tip_x, crack.end_x) + tol

    centroid_y = mesh.cell_centroids()[:, 1]
    upper = on_segment & (centroid_y[:, None] > crack.y)
    lower = on_segment & (centroid_y[:, None] < crack.y)

    widths = x_hi - x_lo
    for mask in (upper, lower):
        if abs(widths[mask].sum() - crack.length) > tol:
            raise SegmentNotOnGrid(
                f"Crack y={crack.y}, x in [{crack.tip_x}, {crack.end_x}] "
                "does not lie on mesh edges"
            )
    return upper, lower


def insert_edge_crack(mesh: Mesh, crack: Optional[CrackSpec] = None) -> Mesh:
    """Split the nodes along the slit so the faces above and below move apart.

    Nodes strictly inside the segment and the end node are duplicated; the
    original index stays with the cells above and the copy (appended in
    ascending x) goes to the cells below. The tip node stays shared.
    """
    crack = crack or CrackSpec()
    if mesh.crack is not None:
        raise ValueError("Mesh already carries a crack")

    upper, lower = _crack_face_masks(mesh, crack)

    tol = Config.GEOMETRY_TOLERANCE
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    lo, hi = sorted((crack.tip_x, crack.end_x))
    on_slit = (np.abs(y - crack.y) < tol) & (x >= lo - tol) & (x <= hi + tol)
    on_slit &= np.abs(x - crack.tip_x) > tol
    split = np.flatnonzero(on_slit)
    split = split[np.argsort(np.abs(x[split] - crack.tip_x), kind="stable")]

    copies = np.full(mesh.n_nodes, -1)
    copies[split] = mesh.n_nodes + np.arange(split.size)

    cells = mesh.cells.copy()
    below = mesh.cell_centroids()[:, 1] < crack.y
    sub = cells[below]
    cells[below] = np.where(copies[sub] >= 0, copies[sub], sub)

    nodes = np.vstack([mesh.nodes, mesh.nodes[split]])
    faces = {tag: arr.copy() for tag, arr in mesh.boundary_faces.items()}
    faces[BoundaryTag.GC] = np.vstack([np.argwhere(upper), np.argwhere(lower)])

    logger.info(
        "Inserted crack: %d nodes split, %d crack faces",
        split.size,
        len(faces[BoundaryTag.GC]),
    )
    return Mesh(
        nodes, cells, faces, crack=crack, refinement_level=mesh.refinement_level
    )


def refine_global(mesh: Mesh) -> Mesh:
    """Quadrisect every cell; tags and crack duplication carry over to children."""
    nodes, cells = mesh.nodes, mesh.cells
    n_nodes, n_cells = mesh.n_nodes, mesh.n_cells

    keys = np.sort(cells[:, EDGE_VERTICES].reshape(-1, 2), axis=1)
    unique_edges, inverse = np.unique(keys, axis=0, return_inverse=True)
    mids = n_nodes + inverse.reshape(n_cells, 4)
    centers = n_nodes + unique_edges.shape[0] + np.arange(n_cells)

    new_nodes = np.vstack(
        [nodes, nodes[unique_edges].mean(axis=1), nodes[cells].mean(axis=1)]
    )

    a, b, c, d = cells.T
    m0, m1, m2, m3 = mids.T
    children = np.stack(
        [
            np.column_stack([a, m0, centers, m3]),
            np.column_stack([m0, b, m1, centers]),
            np.column_stack([centers, m1, c, m2]),
            np.column_stack([m3, centers, m2, d]),
        ],
        axis=1,
    ).reshape(-1, 4)

    faces = {}
    for tag, parent in mesh.boundary_faces.items():
        cell, edge = parent[:, 0], parent[:, 1]
        first = np.column_stack([4 * cell + edge, edge])
        second = np.column_stack([4 * cell + (edge + 1) % 4, edge])
        faces[tag] = np.stack([first, second], axis=1).reshape(-1, 2)

    return Mesh(
        new_nodes,
        children,
        faces,
        crack=mesh.crack,
        refinement_level=mesh.refinement_level + 1,
    )


def edge_geometry(
    mesh: Mesh, faces: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Endpoint node ids (k, 2), lengths (k,) and outward normals (k, 2)."""
    ends = mesh.cells[faces[:, 0][:, None], EDGE_VERTICES[faces[:, 1]]]
    delta = mesh.nodes[ends[:, 1]] - mesh.nodes[ends[:, 0]]
    lengths = np.linalg.norm(delta, axis=1)
    normals = np.column_stack([delta[:, 1], -delta[:, 0]]) / lengths[:, None]
    return ends, lengths, normals


def boundary_edges(mesh: Mesh, tag: TagLike) -> List[BoundaryEdge]:
    """All edges carrying the tag, with length and outward normal."""
    faces = mesh.boundary_faces.get(parse_tag(tag))
    if faces is None or faces.size == 0:
        return []

    _, lengths, normals = edge_geometry(mesh, faces)
    return [
        BoundaryEdge(int(c), int(k), float(length), (float(n[0]), float(n[1])))
        for (c, k), length, n in zip(faces, lengths, normals)
    ]


def tagged_nodes(mesh: Mesh, tag: TagLike) -> np.ndarray:
    """Sorted unique node ids on the edges carrying the tag."""
    faces = mesh.boundary_faces.get(parse_tag(tag))
    if faces is None or faces.size == 0:
        return np.empty(0, dtype=int)
    ends, _, _ = edge_geometry(mesh, faces)
    return np.unique(ends)


def nearest_node(
    mesh: Mesh,
    point: Tuple[float, float],
    candidates: Optional[np.ndarray] = None,
) -> int:
    """Index of the node closest to the point (lowest index on ties)."""
    ids = np.arange(mesh.n_nodes) if candidates is None else np.asarray(candidates)
    dist = np.linalg.norm(mesh.nodes[ids] - np.asarray(point, dtype=float), axis=1)
    return int(ids[np.argmin(dist)])


def cell_adjacency(mesh: Mesh) -> csr_matrix:
    """Cell graph: two cells are adjacent when they share an edge.

    Crack faces use different node copies, so cells across the slit are not
    adjacent.
    """
    keys = np.sort(mesh.cells[:, EDGE_VERTICES].reshape(-1, 2), axis=1)
    owner = np.repeat(np.arange(mesh.n_cells), 4)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)

    order = np.lexsort((owner, inverse))
    edge_sorted, owner_sorted = inverse[order], owner[order]
    shared = edge_sorted[1:] == edge_sorted[:-1]
    a, b = owner_sorted[:-1][shared], owner_sorted[1:][shared]

    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])
    data = np.ones(rows.size)
    return coo_matrix((data, (rows, cols)), shape=(mesh.n_cells, mesh.n_cells)).tocsr()
