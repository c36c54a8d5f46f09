"""Main workflow orchestrator for LangGraph."""

import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

import numpy as np
from langgraph.graph import END, START, StateGraph

from .config.run_config import RunConfig
from .config.settings import Config
from .core.errors import NotConverged
from .core.state import NewtonState, RunState
from .nodes import (
    build_mesh_node,
    initial_guess_node,
    line_search_node,
    newton_step_node,
    postprocess_node,
    route_newton,
    solve_node,
    write_outputs_node,
)
from .services.assembly import BoundaryConditions, build_constraints
from .services.constitutive import MaterialParams
from .services.fespace import FESpace, NodalField, VectorFunction
from .services.output import write_convergence_csv, write_extrema_summary
from .services.solver import SolveReport, SolverConfig
from .services.verify import (
    ConvergenceRow,
    convergence_rows,
    l2_error,
    manufactured_body_force,
    manufactured_boundary_conditions,
    manufactured_params,
    manufactured_solution,
    manufactured_space,
)
from .utils.helpers import beta_dirname

logger = logging.getLogger(__name__)


def create_newton_workflow() -> StateGraph:
    """Damped Newton iteration: one linear solve and one line search per pass."""
    workflow = StateGraph(NewtonState)

    workflow.add_node("initial_guess", initial_guess_node)
    workflow.add_node("newton_step", newton_step_node)
    workflow.add_node("line_search", line_search_node)

    workflow.add_edge(START, "initial_guess")
    workflow.add_edge("initial_guess", "newton_step")
    workflow.add_edge("newton_step", "line_search")
    workflow.add_conditional_edges("line_search", route_newton, ["newton_step", END])

    return workflow


def create_run_workflow() -> StateGraph:
    """One example at one beta."""
    workflow = StateGraph(RunState)

    workflow.add_node("build_mesh", build_mesh_node)
    workflow.add_node("solve", solve_node)
    workflow.add_node("postprocess", postprocess_node)
    workflow.add_node("write_outputs", write_outputs_node)

    workflow.add_edge(START, "build_mesh")
    workflow.add_edge("build_mesh", "solve")
    workflow.add_edge("solve", "postprocess")
    workflow.add_edge("postprocess", "write_outputs")
    workflow.add_edge("write_outputs", END)

    return workflow


@lru_cache(maxsize=None)
def _newton_app():
    return create_newton_workflow().compile()


@lru_cache(maxsize=None)
def _run_app():
    return create_run_workflow().compile()


def create_newton_state(
    space: FESpace,
    params: MaterialParams,
    bcs: BoundaryConditions,
    config: SolverConfig,
    body_force: Optional[VectorFunction] = None,
) -> NewtonState:
    """Create the initial state for the Newton workflow."""
    zeros = np.zeros(space.n_dofs)
    return {
        "space": space,
        "params": params,
        "bcs": bcs,
        "config": config,
        "body_force": body_force,
        "constraints": build_constraints(space, bcs),
        "u": zeros,
        "delta_u": zeros,
        "iteration": 0,
        "residual": float("inf"),
        "residual_history": [],
        "alpha_history": [],
    }


def newton_solve(
    space: FESpace,
    params: MaterialParams,
    bcs: BoundaryConditions,
    config: Optional[SolverConfig] = None,
    body_force: Optional[VectorFunction] = None,
    strict: bool = True,
) -> SolveReport:
    """Solve the nonlinear problem.

    Raises NotConverged, carrying the report, when strict.
    """
    config = config or SolverConfig()
    state = create_newton_state(space, params, bcs, config, body_force)
    limits = {"recursion_limit": 2 * config.max_newton + 10}
    final = _newton_app().invoke(state, limits)

    report = SolveReport(
        converged=final["residual"] <= config.newton_tol,
        iterations=final["iteration"],
        residual_history=list(final["residual_history"]),
        alpha_history=list(final["alpha_history"]),
        solution=NodalField.from_vector(space, final["u"]),
    )
    if not report.converged:
        logger.warning(
            "newton stopped after %d iterations with residual %.3e",
            report.iterations,
            final["residual"],
        )
        if strict:
            raise NotConverged(report)
    return report


def create_run_state(run_config: RunConfig, beta: float, run_dir: Path) -> RunState:
    """Empty run state for one beta."""
    return {
        "run_config": run_config,
        "beta": float(beta),
        "run_dir": str(run_dir),
        "mesh": None,
        "space": None,
        "bcs": None,
        "params": None,
        "report": None,
        "cell_fields": {},
        "profiles": {},
        "extrema": {},
        "files": [],
    }


def run_example(
    run_config: RunConfig, beta: float, output_root: Optional[Path] = None
) -> RunState:
    """Run one beta into <output_root>/beta_<beta>.

    The run directory is removed on failure.
    """
    run_dir = Path(output_root or run_config.output_dir) / beta_dirname(beta)
    try:
        return _run_app().invoke(create_run_state(run_config, beta, run_dir))
    except Exception:
        logger.warning("run beta=%g failed; removing %s", beta, run_dir)
        shutil.rmtree(run_dir, ignore_errors=True)
        raise


def run_sweep(
    run_config: RunConfig, max_workers: int = Config.MAX_WORKERS
) -> List[RunState]:
    """Run every configured beta, concurrently when max_workers > 1.

    The extrema summary covers the betas that finished; the first failure is
    re-raised afterwards.
    """
    root = Path(run_config.output_dir)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        futures = [
            pool.submit(run_example, run_config, beta, root)
            for beta in run_config.betas
        ]

    results, failures = [], []
    for beta, future in zip(run_config.betas, futures):
        try:
            results.append(future.result())
        except Exception as exc:
            logger.warning("beta=%g failed: %s", beta, exc)
            failures.append(exc)

    if results:
        write_extrema_summary(
            [(s["beta"], s["extrema"]) for s in results],
            root / "extrema_summary.csv",
        )
    if failures:
        raise failures[0]
    return results


def convergence_study(
    cycles: int = Config.CONVERGENCE_CYCLES,
    params: Optional[MaterialParams] = None,
    config: Optional[SolverConfig] = None,
    output_path: Optional[Path] = None,
) -> List[ConvergenceRow]:
    """h-refinement study on the manufactured solution.

    Cycle k uses h = 0.5 * 2^(1-k).
    """
    params = params or manufactured_params()
    body_force = manufactured_body_force(params)
    bcs = manufactured_boundary_conditions()

    hs, errors, n_dofs = [], [], []
    for cycle in range(1, cycles + 1):
        space = manufactured_space(cycle)
        report = newton_solve(space, params, bcs, config, body_force)
        error = l2_error(space, report.solution, manufactured_solution)
        logger.info(
            "cycle=%d h=%g dofs=%d l2_error=%.6e",
            cycle,
            space.mesh.h,
            space.n_dofs,
            error,
        )
        hs.append(space.mesh.h)
        errors.append(error)
        n_dofs.append(space.n_dofs)

    rows = convergence_rows(list(range(1, cycles + 1)), hs, errors, n_dofs)
    if output_path is not None:
        write_convergence_csv(rows, output_path)
    return rows
