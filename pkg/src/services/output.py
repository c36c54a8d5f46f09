"""Result files: legacy VTK fields, CSV profiles and tables, Newton iteration logs."""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.errors import OutputError
from ..utils.helpers import format_number
from .fespace import NodalField
from .mesh import Mesh
from .postproc import CellField, LineProfile
from .solver import SolveReport
from .verify import ConvergenceRow

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
VTK_QUAD = 9


def _open(path: PathLike):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"Cannot open {path} for writing: {exc}") from exc


def _write_rows(
    path: PathLike, header: Sequence[str], rows: Iterable[Sequence[str]]
) -> Path:
    try:
        with _open(path) as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OutputError(f"Failed to write {path}: {exc}") from exc
    logger.info("wrote %s", path)
    return Path(path)


def write_vtk(
    mesh: Mesh,
    cellfields: Sequence[CellField],
    nodalfield: Optional[NodalField],
    path: PathLike,
    title: str = "density-dependent elasticity",
) -> Path:
    """Legacy ASCII unstructured grid; with no data it is a mesh-only dump."""
    for cf in cellfields:
        if cf.values.size != mesh.n_cells:
            raise ValueError(
                f"Cell field {cf.name} has {cf.values.size} values "
                f"for {mesh.n_cells} cells"
            )
    if nodalfield is not None and nodalfield.values.shape[0] != mesh.n_nodes:
        raise ValueError("Displacement field does not match the mesh")

    lines: List[str] = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_nodes} double",
    ]
    lines += [f"{format_number(x)} {format_number(y)} 0" for x, y in mesh.nodes]
    lines.append(f"CELLS {mesh.n_cells} {5 * mesh.n_cells}")
    lines += ["4 " + " ".join(str(int(n)) for n in cell) for cell in mesh.cells]
    lines.append(f"CELL_TYPES {mesh.n_cells}")
    lines += [str(VTK_QUAD)] * mesh.n_cells

    if nodalfield is not None:
        lines += [f"POINT_DATA {mesh.n_nodes}", "VECTORS displacement double"]
        lines += [
            f"{format_number(u1)} {format_number(u2)} 0"
            for u1, u2 in nodalfield.values
        ]

    if cellfields:
        lines.append(f"CELL_DATA {mesh.n_cells}")
        for cf in cellfields:
            lines += [f"SCALARS {cf.name} double 1", "LOOKUP_TABLE default"]
            lines += [format_number(v) for v in cf.values]

    try:
        with _open(path) as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"Failed to write {path}: {exc}") from exc
    logger.info("wrote %s", path)
    return Path(path)


def write_profile_csv(profile: LineProfile, path: PathLike) -> Path:
    """`x_over_L,value` rows of one line profile."""
    rows = (
        (format_number(x), format_number(v))
        for x, v in zip(profile.x_over_L, profile.values)
    )
    return _write_rows(path, ("x_over_L", "value"), rows)


def write_pairs_csv(
    x: np.ndarray, y: np.ndarray, header: Tuple[str, str], path: PathLike
) -> Path:
    """Two aligned columns, e.g. K_dr against the volumetric strain."""
    rows = ((format_number(a), format_number(b)) for a, b in zip(x, y))
    return _write_rows(path, header, rows)


def write_extrema_csv(extrema: Dict[str, Tuple[float, float]], path: PathLike) -> Path:
    """`quantity,max,min` rows for one run."""
    rows = (
        (name, format_number(high), format_number(low))
        for name, (high, low) in extrema.items()
    )
    return _write_rows(path, ("quantity", "max", "min"), rows)


def write_extrema_summary(
    summary: Sequence[Tuple[float, Dict[str, Tuple[float, float]]]], path: PathLike
) -> Path:
    """Extrema of a whole sweep, ordered by beta."""
    rows = [
        (format_number(beta), name, format_number(high), format_number(low))
        for beta, extrema in sorted(summary, key=lambda item: item[0])
        for name, (high, low) in extrema.items()
    ]
    return _write_rows(path, ("beta", "quantity", "max", "min"), rows)


def write_convergence_csv(rows: Sequence[ConvergenceRow], path: PathLike) -> Path:
    """Convergence table; the rate of the first cycle is left empty."""
    records = (
        (
            str(r.cycle),
            format_number(r.h),
            format_number(r.l2_error),
            "" if r.rate is None else format_number(r.rate),
        )
        for r in rows
    )
    return _write_rows(path, ("cycle", "h", "l2_error", "rate"), records)


def write_iteration_log(report: SolveReport, path: PathLike) -> Path:
    """`iteration residual alpha`, one record per Newton iterate."""
    lines = ["iteration residual alpha"]
    alphas = ["-"] + [format_number(a) for a in report.alpha_history]
    for k, (residual, alpha) in enumerate(zip(report.residual_history, alphas)):
        lines.append(f"{k} {format_number(residual)} {alpha}")
    try:
        with _open(path) as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"Failed to write {path}: {exc}") from exc
    return Path(path)
