"""Core workflow state definitions."""

from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from typing_extensions import TypedDict

from ..services.assembly import BoundaryConditions, DirichletConstraints
from ..services.constitutive import MaterialParams
from ..services.fespace import FESpace, VectorFunction
from ..services.mesh import Mesh
from ..services.postproc import CellField, LineProfile
from ..services.solver import SolveReport, SolverConfig


class NewtonState(TypedDict):
    """State of the damped Newton iteration."""

    space: FESpace
    params: MaterialParams
    bcs: BoundaryConditions
    config: SolverConfig
    body_force: Optional[VectorFunction]
    constraints: DirichletConstraints
    u: np.ndarray  # current iterate, global DOF vector
    delta_u: np.ndarray  # last Newton direction
    iteration: int
    residual: float
    residual_history: List[float]
    alpha_history: List[float]


class RunState(TypedDict):
    """State of one example run at one beta."""

    run_config: Any  # RunConfig; typed loosely to keep config independent of core
    beta: float
    run_dir: str
    mesh: Optional[Mesh]
    space: Optional[FESpace]
    bcs: Optional[BoundaryConditions]
    params: Optional[MaterialParams]
    report: Optional[SolveReport]
    cell_fields: Dict[str, CellField]
    profiles: Dict[str, LineProfile]
    extrema: Dict[str, Tuple[float, float]]
    files: List[str]
