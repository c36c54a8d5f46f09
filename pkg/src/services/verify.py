"""Manufactured-solution convergence data and consistency oracles."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import Config
from .assembly import BoundaryConditions, DirichletSpec
from .constitutive import (
    MaterialParams,
    SymTensor2,
    cauchy_stress,
    density_factor,
    tangent_apply,
)
from .fespace import FESpace, NodalField, VectorFunction, build_q1_space, gauss_rule
from .mesh import BoundaryTag, build_unit_square

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
FD_STEPS = (1e-3, 1e-4, 1e-5)
FD_EXACT_TOLERANCE = 1e-12


def manufactured_params() -> MaterialParams:
    return MaterialParams(
        Config.MANUFACTURED_YOUNGS_MODULUS,
        Config.MANUFACTURED_POISSON_RATIO,
        Config.MANUFACTURED_BETA,
    )


def manufactured_solution(points: np.ndarray) -> np.ndarray:
    """u = (sin(pi x / 2), -cos(pi y / 2)) at points (n, 2)."""
    x, y = points[..., 0], points[..., 1]
    return np.stack([np.sin(HALF_PI * x), -np.cos(HALF_PI * y)], axis=-1)


def _manufactured_strain(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x, y = points[..., 0], points[..., 1]
    return HALF_PI * np.cos(HALF_PI * x), HALF_PI * np.sin(HALF_PI * y)


def manufactured_body_force(params: MaterialParams) -> VectorFunction:
    """f = -div T(u) for the manufactured displacement.

    The strain is diagonal, eps = diag(a(x), b(y)), so only dT11/dx and
    dT22/dy survive in the divergence.
    """
    c1, c2, beta = params.c1, params.c2, params.beta

    def body_force(points: np.ndarray) -> np.ndarray:
        a, b = _manufactured_strain(points)
        x, y = points[..., 0], points[..., 1]
        da = -HALF_PI**2 * np.sin(HALF_PI * x)
        db = HALF_PI**2 * np.cos(HALF_PI * y)
        d = density_factor(SymTensor2(a, b, np.zeros_like(a)), params)

        dT11 = da * ((c1 + c2) * d - beta * (c1 * a + c2 * (a + b))) / d**2
        dT22 = db * ((c1 + c2) * d - beta * (c1 * b + c2 * (a + b))) / d**2
        return np.stack([-dT11, -dT22], axis=-1)

    return body_force


def manufactured_boundary_conditions() -> BoundaryConditions:
    """u = u_exact on all four sides."""
    spec = DirichletSpec((0, 1), manufactured_solution)
    sides = (BoundaryTag.G1, BoundaryTag.G2, BoundaryTag.G3, BoundaryTag.G4)
    return BoundaryConditions({tag: spec for tag in sides})


def manufactured_space(cycle: int) -> FESpace:
    """Uniform mesh of cycle k has h = 0.5 * 2^(1 - k)."""
    if cycle < 1:
        raise ValueError(f"cycle must be at least 1, got {cycle}")
    return build_q1_space(build_unit_square(cycle))


def l2_error(space: FESpace, u_h: NodalField, u_exact: VectorFunction) -> float:
    """L2 norm of u_h - u_exact with 3x3 Gauss points per cell."""
    geo = space.cell_geometry(gauss_rule(3))
    diff = u_h.at_quadrature(geo) - u_exact(geo.points)
    return float(np.sqrt(np.sum(geo.jxw * np.sum(diff**2, axis=-1))))


@dataclass(frozen=True)
class ConvergenceRow:
    """One cycle of the h-refinement study.

    ``rate`` is the two-dimensional DOF-based reduction rate
    2 ln(e_prev / e) / ln(N / N_prev); ``h_rate`` is log2(e_prev / e).
    """

    cycle: int
    h: float
    l2_error: float
    n_dofs: int
    rate: Optional[float] = None
    h_rate: Optional[float] = None


def convergence_rows(
    cycles: Sequence[int],
    hs: Sequence[float],
    errors: Sequence[float],
    n_dofs: Sequence[int],
) -> List[ConvergenceRow]:
    """Attach rates to per-cycle errors; the first row has none."""
    rows: List[ConvergenceRow] = []
    for k, (cycle, h, err, dofs) in enumerate(zip(cycles, hs, errors, n_dofs)):
        if k == 0:
            rows.append(ConvergenceRow(cycle, h, err, dofs))
            continue
        ratio = errors[k - 1] / err
        rate = 2.0 * math.log(ratio) / math.log(dofs / n_dofs[k - 1])
        rows.append(ConvergenceRow(cycle, h, err, dofs, rate, math.log2(ratio)))
    return rows


@dataclass(frozen=True)
class TangentCheck:
    """Observed central-difference order of the stress tangent."""

    order: float
    max_deviation: float
    trials: int

    @property
    def passed(self) -> bool:
        return self.order >= 1.9


def _random_state(
    rng: np.random.Generator, beta: float
) -> Tuple[SymTensor2, SymTensor2]:
    """Admissible strain with |beta tr eps| <= 0.5 and a perturbation direction."""
    eps = SymTensor2(*rng.uniform(-1e-3, 1e-3, size=3))
    direction = SymTensor2(*rng.uniform(-1.0, 1.0, size=3))
    if beta == 0.0:
        return eps, direction

    target = rng.uniform(-0.5, 0.5) / beta
    eps = eps + SymTensor2.identity().scale(0.5 * (target - eps.trace))
    # Steer the direction's trace so the nonlinearity dominates round-off.
    trace = math.copysign(10.0 / abs(beta), rng.uniform(-1.0, 1.0))
    direction = direction + SymTensor2.identity().scale(0.5 * (trace - direction.trace))
    return eps, direction


def tangent_fd_check(
    params: MaterialParams, trials: int = 100, seed: int = 0
) -> TangentCheck:
    """Compare tangent_apply with central differences of cauchy_stress.

    Returns the smallest fitted order over all trials. Trials whose deviation
    stays below round-off at every step are exact and do not enter the fit.
    """
    rng = np.random.default_rng(seed)
    log_h = np.log(FD_STEPS)
    orders, worst = [], 0.0

    for _ in range(trials):
        eps, direction = _random_state(rng, params.beta)
        exact = tangent_apply(eps, direction.as_matrix(), params).as_matrix()
        deviations = []
        for h in FD_STEPS:
            step = direction.scale(h)
            forward = cauchy_stress(eps + step, params).as_matrix()
            backward = cauchy_stress(eps - step, params).as_matrix()
            fd = (forward - backward) / (2.0 * h)
            deviations.append(np.linalg.norm(fd - exact) / np.linalg.norm(exact))
        deviations = np.asarray(deviations)
        worst = max(worst, float(deviations.max()))
        if deviations.max() <= FD_EXACT_TOLERANCE:
            continue
        slope, _ = np.polyfit(log_h, np.log(deviations), 1)
        orders.append(float(slope))

    order = min(orders) if orders else math.inf
    logger.info(
        "tangent check beta=%g trials=%d order=%.3f max_deviation=%.3e",
        params.beta,
        trials,
        order,
        worst,
    )
    return TangentCheck(order, worst, trials)
