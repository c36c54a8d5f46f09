"""Element-averaged derived fields, reference-line profiles and SIF profiles."""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from ..config.settings import Config
from ..core.errors import SegmentNotOnGrid
from .constitutive import (
    MaterialParams,
    bulk_modulus,
    cauchy_stress,
    density_ratio,
    lame_nonlinear,
    strain,
    strain_energy_density,
)
from .fespace import FESpace, NodalField
from .mesh import Mesh


class Quantity(str, Enum):
    """Cell quantities available for averaging and output."""

    T11 = "T11"
    T22 = "T22"
    T21 = "T21"
    EPS11 = "eps11"
    EPS22 = "eps22"
    EPS21 = "eps21"
    SED = "SED"
    K_DR = "K_dr"
    TRACE = "trace_strain"
    DENSITY_RATIO = "density_ratio"
    LAMBDA = "lambda"
    MU = "mu"


class SifMode(str, Enum):
    I = "I"  # noqa: E741
    II = "II"


@dataclass(frozen=True)
class CellField:
    """One value per cell."""

    name: str
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
            raise ValueError(f"Cell field {self.name} must be a finite 1-D array")


@dataclass(frozen=True)
class LineProfile:
    """Samples along a horizontal segment; coordinates are x/L in [0, 1]."""

    x_over_L: np.ndarray
    values: np.ndarray
    length: float
    origin: float = 0.0

    def __post_init__(self) -> None:
        x = self.x_over_L
        if x.size and (np.any(np.diff(x) <= 0) or x[0] < 0.0 or x[-1] > 1.0):
            raise ValueError("Profile coordinates must increase strictly within [0, 1]")

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.x_over_L * self.length


@dataclass(frozen=True)
class Segment:
    """Horizontal segment y = const, x in [x0, x1]."""

    y: float
    x0: float
    x1: float

    @property
    def length(self) -> float:
        return self.x1 - self.x0


def _pointwise(
    quantity: Quantity, u_grad: np.ndarray, params: MaterialParams
) -> np.ndarray:
    eps = strain(u_grad)
    if quantity in (Quantity.T11, Quantity.T22, Quantity.T21):
        stress = cauchy_stress(eps, params)
        components = {
            Quantity.T11: stress.xx,
            Quantity.T22: stress.yy,
            Quantity.T21: stress.xy,
        }
        return components[quantity]
    if quantity is Quantity.EPS11:
        return eps.xx
    if quantity is Quantity.EPS22:
        return eps.yy
    if quantity is Quantity.EPS21:
        return eps.xy
    if quantity is Quantity.SED:
        return strain_energy_density(eps, params)
    if quantity is Quantity.K_DR:
        return bulk_modulus(eps, params)
    if quantity is Quantity.TRACE:
        return eps.trace
    if quantity is Quantity.DENSITY_RATIO:
        return density_ratio(eps)
    lam, mu = lame_nonlinear(eps, params)
    return lam if quantity is Quantity.LAMBDA else mu


def cell_average(
    space: FESpace,
    u: NodalField,
    params: MaterialParams,
    quantity: Union[Quantity, str],
) -> CellField:
    """Quadrature-weighted cell average of a pointwise quantity."""
    quantity = Quantity(quantity)
    geo = space.geometry
    pointwise = _pointwise(quantity, u.gradients(geo), params)
    values = np.broadcast_to(pointwise, geo.jxw.shape)
    averages = np.sum(values * geo.jxw, axis=1) / np.sum(geo.jxw, axis=1)
    return CellField(quantity.value, averages)


def _cell_bounds(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray]:
    xy = mesh.cell_coordinates()
    return xy.min(axis=1), xy.max(axis=1)


def line_profile(mesh: Mesh, cellfield: CellField, segment: Segment) -> LineProfile:
    """One sample per element column: mean of the cells just above and below."""
    tol = Config.GEOMETRY_TOLERANCE
    lo, hi = _cell_bounds(mesh)
    in_span = (lo[:, 0] >= segment.x0 - tol) & (hi[:, 0] <= segment.x1 + tol)
    above = np.flatnonzero(in_span & (np.abs(lo[:, 1] - segment.y) < tol))
    below = np.flatnonzero(in_span & (np.abs(hi[:, 1] - segment.y) < tol))

    centers = {}
    for side in (above, below):
        if side.size == 0:
            continue
        widths = hi[side, 0] - lo[side, 0]
        if abs(widths.sum() - segment.length) > tol:
            raise SegmentNotOnGrid(
                f"Segment {segment} does not follow element boundaries"
            )
        for cell in side:
            key = round(0.5 * (lo[cell, 0] + hi[cell, 0]) / tol)
            centers.setdefault(key, []).append(cell)
    if not centers:
        raise SegmentNotOnGrid(f"Segment {segment} is not a mesh grid line")

    keys = sorted(centers)
    x_center = np.array([k * tol for k in keys])
    values = np.array([cellfield.values[centers[k]].mean() for k in keys])
    x_over_L = (x_center - segment.x0) / segment.length
    return LineProfile(x_over_L, values, segment.length, segment.x0)


def sif_profile(
    stress_profile: LineProfile,
    tip_x: float,
    mode: Union[SifMode, str] = SifMode.I,
) -> LineProfile:
    """K(r) = sqrt(2 pi r) T(r) with r the distance to the crack tip.

    Pass T22 for mode I and T21 for mode II.
    """
    SifMode(mode)
    r = np.abs(tip_x - stress_profile.x)
    values = np.sqrt(2.0 * np.pi * r) * stress_profile.values
    return LineProfile(
        stress_profile.x_over_L, values, stress_profile.length, stress_profile.origin
    )


def field_extrema(cellfield: CellField) -> Tuple[float, float]:
    """Global (max, min) over cells."""
    if cellfield.values.size == 0:
        raise ValueError("Cell field is empty")
    return float(cellfield.values.max()), float(cellfield.values.min())


def displacement_profile(
    u: NodalField, segment: Segment, component: int
) -> LineProfile:
    """Nodal displacement along a segment; split crack nodes are averaged."""
    tol = Config.GEOMETRY_TOLERANCE
    nodes = u.space.mesh.nodes
    on_line = np.abs(nodes[:, 1] - segment.y) < tol
    on_line &= (nodes[:, 0] >= segment.x0 - tol) & (nodes[:, 0] <= segment.x1 + tol)
    ids = np.flatnonzero(on_line)
    if ids.size < 2:
        raise SegmentNotOnGrid(f"Segment {segment} is not a mesh grid line")

    grid_x = np.round(nodes[ids, 0] / tol).astype(np.int64)
    keys, inverse = np.unique(grid_x, return_inverse=True)
    sums = np.bincount(inverse, weights=u.values[ids, component])
    counts = np.bincount(inverse)
    x = keys * tol
    x_over_L = (x - segment.x0) / segment.length
    return LineProfile(x_over_L, sums / counts, segment.length, segment.x0)
