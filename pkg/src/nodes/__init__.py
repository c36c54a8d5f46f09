"""Workflow node modules."""

from .example import build_mesh_node, postprocess_node, solve_node, write_outputs_node
from .newton import initial_guess_node, line_search_node, newton_step_node, route_newton

__all__ = [
    "initial_guess_node",
    "newton_step_node",
    "line_search_node",
    "route_newton",
    "build_mesh_node",
    "solve_node",
    "postprocess_node",
    "write_outputs_node",
]
