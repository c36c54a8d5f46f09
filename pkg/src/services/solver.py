"""Linear solves, initial guess, residual merit and backtracking line search."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import sparse as sp
from scipy.sparse.linalg import splu

from ..config.settings import Config
from ..core.errors import SingularDensityFactor, SingularMatrix, ValidationError
from .assembly import (
    BoundaryConditions,
    DirichletConstraints,
    apply_dirichlet,
    assemble_loads,
    assemble_residual,
    assemble_tangent,
    build_constraints,
)
from .constitutive import MaterialParams
from .fespace import FESpace, NodalField, VectorFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Newton and line-search controls."""

    newton_tol: float = Config.NEWTON_TOL
    max_newton: int = Config.MAX_NEWTON
    alpha_bar: float = Config.ALPHA_BAR
    line_search_factor: float = Config.LINE_SEARCH_FACTOR
    max_line_search: int = Config.MAX_LINE_SEARCH

    def __post_init__(self) -> None:
        if self.newton_tol < 0:
            raise ValidationError(
                "tol", f"must be non-negative, got {self.newton_tol}"
            )
        if self.max_newton < 1:
            raise ValidationError(
                "max_newton", f"must be at least 1, got {self.max_newton}"
            )
        if not self.alpha_bar > 0:
            raise ValidationError(
                "alpha_bar", f"must be positive, got {self.alpha_bar}"
            )
        if not 0.0 < self.line_search_factor < 1.0:
            raise ValidationError(
                "line_search_factor",
                f"must lie in (0, 1), got {self.line_search_factor}",
            )
        if self.max_line_search < 0:
            raise ValidationError(
                "max_line_search",
                f"must be non-negative, got {self.max_line_search}",
            )

    def trial_steps(self) -> List[float]:
        """alpha_bar * factor^k for k = 0 .. max_line_search."""
        steps = range(self.max_line_search + 1)
        return [self.alpha_bar * self.line_search_factor**k for k in steps]


@dataclass
class SolveReport:
    """Outcome of one Newton solve."""

    converged: bool
    iterations: int
    residual_history: List[float] = field(default_factory=list)
    alpha_history: List[float] = field(default_factory=list)
    solution: Optional[NodalField] = None


def solve_linear_system(matrix: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """Direct sparse LU solve with partial pivoting."""
    if matrix.shape[0] != matrix.shape[1]:
        raise SingularMatrix(f"Matrix is not square: {matrix.shape}")

    try:
        lu = splu(sp.csc_matrix(matrix))
    except RuntimeError as exc:
        raise SingularMatrix(str(exc)) from exc

    pivots = np.abs(lu.U.diagonal())
    if pivots.size and pivots.min() <= Config.SINGULAR_PIVOT_RATIO * pivots.max():
        raise SingularMatrix(
            "Matrix is numerically singular "
            f"(pivot ratio {pivots.min() / pivots.max():.3e}); "
            "check that rigid-body motions are constrained"
        )

    solution = lu.solve(np.asarray(rhs, dtype=float))
    if not np.all(np.isfinite(solution)):
        raise SingularMatrix("Linear solve produced non-finite values")
    return solution


def initial_guess(
    space: FESpace,
    params: MaterialParams,
    bcs: BoundaryConditions,
    body_force: Optional[VectorFunction] = None,
    constraints: Optional[DirichletConstraints] = None,
) -> NodalField:
    """Solution of the linear (beta = 0) problem with the full Dirichlet data."""
    constraints = constraints or build_constraints(space, bcs)
    stiffness = assemble_tangent(space, NodalField.zeros(space), params.linear)
    loads = assemble_loads(space, bcs, body_force)
    matrix, rhs = apply_dirichlet(stiffness, loads, constraints)
    return NodalField.from_vector(space, solve_linear_system(matrix, rhs))


def constrained_residual(
    space: FESpace,
    u: NodalField,
    params: MaterialParams,
    bcs: BoundaryConditions,
    constraints: DirichletConstraints,
    body_force: Optional[VectorFunction] = None,
) -> np.ndarray:
    """Assembled residual with the constrained entries zeroed."""
    residual = assemble_residual(space, u, params, bcs, body_force)
    residual[constraints.dofs] = 0.0
    return residual


def residual_norm(
    space: FESpace,
    u: NodalField,
    params: MaterialParams,
    bcs: BoundaryConditions,
    body_force: Optional[VectorFunction] = None,
    constraints: Optional[DirichletConstraints] = None,
) -> float:
    """Euclidean norm of the constrained residual; the line-search merit."""
    constraints = constraints or build_constraints(space, bcs)
    residual = constrained_residual(space, u, params, bcs, constraints, body_force)
    return float(np.linalg.norm(residual))


def line_search(
    u_n: np.ndarray,
    delta_u: np.ndarray,
    merit: Callable[[np.ndarray], float],
    config: SolverConfig,
    merit_n: Optional[float] = None,
) -> float:
    """Halve the step until the merit decreases.

    Returns the first trial step with a merit below merit(u_n); when none
    decreases, the trial with the smallest merit. A trial whose state hits a
    singular density factor counts as infinite merit.
    """
    if not np.all(np.isfinite(delta_u)):
        raise ValueError("Search direction contains non-finite values")
    reference = merit(u_n) if merit_n is None else merit_n

    best_alpha, best_merit = None, math.inf
    last_error: Optional[SingularDensityFactor] = None
    for alpha in config.trial_steps():
        try:
            value = merit(u_n + alpha * delta_u)
        except SingularDensityFactor as exc:
            logger.debug(
                "line search alpha=%g hit singular density factor: %s", alpha, exc
            )
            last_error = exc
            continue
        if not math.isfinite(value):
            raise ValueError(f"Merit at alpha={alpha:g} is not finite: {value}")
        if value < reference:
            return alpha
        if value < best_merit:
            best_alpha, best_merit = alpha, value

    if best_alpha is None:
        if last_error is not None:
            raise last_error
        raise ValueError("Line search has no trial steps")
    logger.warning(
        "line search found no decrease; taking alpha=%g (merit %.3e)",
        best_alpha,
        best_merit,
    )
    return best_alpha


def admissible_start(
    u_lin: np.ndarray,
    lift: np.ndarray,
    merit: Callable[[np.ndarray], float],
    config: SolverConfig,
) -> Tuple[np.ndarray, float]:
    """Starting point for Newton and its merit.

    The linear solution is used as is when every density factor is positive.
    Otherwise u_lin - lift is treated as a search direction from the Dirichlet
    lift and damped by the line search, so the start keeps the boundary data.
    """
    try:
        return u_lin, merit(u_lin)
    except SingularDensityFactor as exc:
        logger.warning("linear initial guess is inadmissible (%s); damping it", exc)

    alpha = line_search(lift, u_lin - lift, merit, config)
    u0 = lift + alpha * (u_lin - lift)
    logger.info("damped initial guess with alpha=%g", alpha)
    return u0, merit(u0)
