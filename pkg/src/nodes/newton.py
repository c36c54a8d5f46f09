"""Nodes of the damped Newton iteration."""

import logging

import numpy as np
from langgraph.graph import END

from ..core.state import NewtonState
from ..services.assembly import apply_dirichlet, assemble_tangent
from ..services.fespace import NodalField
from ..services.solver import (
    admissible_start,
    constrained_residual,
    initial_guess,
    line_search,
    solve_linear_system,
)

logger = logging.getLogger(__name__)


def _merit(state: NewtonState):
    space, params, bcs = state["space"], state["params"], state["bcs"]
    constraints, body_force = state["constraints"], state["body_force"]

    def merit(vector) -> float:
        u = NodalField.from_vector(space, vector)
        residual = constrained_residual(space, u, params, bcs, constraints, body_force)
        return float(np.linalg.norm(residual))

    return merit


def initial_guess_node(state: NewtonState) -> NewtonState:
    """Start from the linear solution, damped toward the lift if inadmissible."""
    constraints = state["constraints"]
    u_lin = initial_guess(
        state["space"], state["params"], state["bcs"], state["body_force"], constraints
    ).as_vector()
    lift = constraints.impose(np.zeros_like(u_lin))
    u0, residual = admissible_start(u_lin, lift, _merit(state), state["config"])
    logger.info("newton iteration=%d residual=%.6e alpha=-", 0, residual)

    return {
        **state,
        "u": u0,
        "iteration": 0,
        "residual": residual,
        "residual_history": [residual],
        "alpha_history": [],
    }


def newton_step_node(state: NewtonState) -> NewtonState:
    """Solve the linearized problem for the update.

    The update is homogeneous on the Dirichlet DOFs.
    """
    space, params = state["space"], state["params"]
    u_n = NodalField.from_vector(space, state["u"])

    tangent = assemble_tangent(space, u_n, params)
    residual = constrained_residual(
        space, u_n, params, state["bcs"], state["constraints"], state["body_force"]
    )
    matrix, rhs = apply_dirichlet(tangent, residual, state["constraints"].homogeneous())
    return {**state, "delta_u": solve_linear_system(matrix, rhs)}


def line_search_node(state: NewtonState) -> NewtonState:
    """Damped update u + alpha * delta_u."""
    merit = _merit(state)
    alpha = line_search(
        state["u"], state["delta_u"], merit, state["config"], state["residual"]
    )
    u_next = state["u"] + alpha * state["delta_u"]
    residual = merit(u_next)
    iteration = state["iteration"] + 1
    logger.info(
        "newton iteration=%d residual=%.6e alpha=%.6g", iteration, residual, alpha
    )

    return {
        **state,
        "u": u_next,
        "iteration": iteration,
        "residual": residual,
        "residual_history": state["residual_history"] + [residual],
        "alpha_history": state["alpha_history"] + [alpha],
    }


def route_newton(state: NewtonState) -> str:
    """Stop on tolerance or at the iteration cap."""
    config = state["config"]
    converged = state["residual"] <= config.newton_tol
    if converged or state["iteration"] >= config.max_newton:
        return END
    return "newton_step"
