"""Nodes of one example run: mesh, solve, post-process, write."""

from pathlib import Path
from typing import Dict, List

from ..core.state import RunState
from ..services.fespace import build_q1_space
from ..services.mesh import build_unit_square, insert_edge_crack
from ..services.output import (
    write_extrema_csv,
    write_iteration_log,
    write_pairs_csv,
    write_profile_csv,
    write_vtk,
)
from ..services.postproc import (
    LineProfile,
    Quantity,
    SifMode,
    cell_average,
    displacement_profile,
    field_extrema,
    line_profile,
    sif_profile,
)

SIF_COMPONENTS = {"K_I": (Quantity.T22, SifMode.I), "K_II": (Quantity.T21, SifMode.II)}
DISPLACEMENT_COMPONENTS = {"u1": 0, "u2": 1}


def build_mesh_node(state: RunState) -> RunState:
    """Build the mesh, cut the crack if the problem has one, set up the space."""
    config = state["run_config"]
    problem = config.problem
    print(
        f"🧱 Example {problem.name} (beta={state['beta']:g}): "
        f"building mesh with {config.refinements} refinements"
    )

    mesh = build_unit_square(config.refinements)
    if problem.crack:
        mesh = insert_edge_crack(mesh)

    return {
        **state,
        "mesh": mesh,
        "space": build_q1_space(mesh),
        "bcs": problem.boundary_conditions(),
        "params": config.material(state["beta"]),
    }


def solve_node(state: RunState) -> RunState:
    """Damped Newton solve from the linear initial guess."""
    from ..workflow import newton_solve

    report = newton_solve(
        state["space"], state["params"], state["bcs"], state["run_config"].solver
    )
    print(
        f"✅ beta={state['beta']:g}: converged in {report.iterations} "
        f"Newton iterations (residual {report.residual_history[-1]:.3e})"
    )
    return {**state, "report": report}


def _required_quantities(fields, profiles) -> List[str]:
    names = list(fields)
    extra = [Quantity.K_DR.value, Quantity.TRACE.value]
    for name in profiles:
        if name in SIF_COMPONENTS:
            extra.append(SIF_COMPONENTS[name][0].value)
        elif name not in DISPLACEMENT_COMPONENTS:
            extra.append(name)
    return names + [name for name in dict.fromkeys(extra) if name not in names]


def postprocess_node(state: RunState) -> RunState:
    """Cell averages, reference-line profiles and extrema."""
    config = state["run_config"]
    problem = config.problem
    space, params, u = state["space"], state["params"], state["report"].solution
    segment = problem.reference_segment

    cell_fields = {
        name: cell_average(space, u, params, name)
        for name in _required_quantities(config.fields, config.profiles)
    }

    profiles: Dict[str, LineProfile] = {}
    for name in config.profiles:
        if name in SIF_COMPONENTS:
            if problem.tip_x is None:
                continue
            component, mode = SIF_COMPONENTS[name]
            stress = line_profile(space.mesh, cell_fields[component.value], segment)
            profiles[name] = sif_profile(stress, problem.tip_x, mode)
        elif name in DISPLACEMENT_COMPONENTS:
            if problem.crack:
                continue
            axis = DISPLACEMENT_COMPONENTS[name]
            profiles[name] = displacement_profile(u, segment, axis)
        else:
            profiles[name] = line_profile(space.mesh, cell_fields[name], segment)

    for name in (Quantity.K_DR.value, Quantity.TRACE.value):
        if name not in profiles:
            profiles[name] = line_profile(space.mesh, cell_fields[name], segment)

    extrema = {name: field_extrema(cell_fields[name]) for name in config.fields}
    return {
        **state,
        "cell_fields": cell_fields,
        "profiles": profiles,
        "extrema": extrema,
    }


def write_outputs_node(state: RunState) -> RunState:
    """Write fields, profiles, extrema and the iteration log into the run directory."""
    config = state["run_config"]
    run_dir = Path(state["run_dir"])
    report = state["report"]
    profiles = state["profiles"]

    files = [
        write_vtk(
            state["mesh"],
            [state["cell_fields"][name] for name in config.fields],
            report.solution,
            run_dir / "fields.vtk",
        )
    ]
    for name in config.profiles:
        if name in profiles:
            path = run_dir / f"profile_{name}.csv"
            files.append(write_profile_csv(profiles[name], path))

    trace, bulk = profiles[Quantity.TRACE.value], profiles[Quantity.K_DR.value]
    files.append(
        write_pairs_csv(
            trace.values,
            bulk.values,
            ("trace_strain", "K_dr"),
            run_dir / "profile_K_dr_vs_trace.csv",
        )
    )
    files.append(write_extrema_csv(state["extrema"], run_dir / "extrema.csv"))
    files.append(write_iteration_log(report, run_dir / "iterations.log"))

    print(f"📄 beta={state['beta']:g}: wrote {len(files)} files to {run_dir}")
    return {**state, "files": [str(f) for f in files]}
