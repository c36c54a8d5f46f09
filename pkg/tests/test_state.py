"""Tests for workflow state."""

from typing import get_type_hints

from src.config.run_config import RunConfig
from src.core.state import NewtonState, RunState
from src.services.constitutive import MaterialParams
from src.services.examples import make_example
from src.services.fespace import build_q1_space
from src.services.mesh import build_unit_square
from src.services.solver import SolverConfig
from src.workflow import create_newton_state, create_run_state


class TestNewtonState:
    """Test cases for NewtonState."""

    def test_newton_state_structure(self):
        """Test NewtonState declares the iterate, histories and problem data."""
        hints = get_type_hints(NewtonState)
        for key in ("space", "params", "bcs", "config", "constraints", "u", "delta_u",
                    "iteration", "residual", "residual_history", "alpha_history"):
            assert key in hints

    def test_initial_newton_state(self):
        """Test the initial state starts from zero with empty histories."""
        space = build_q1_space(build_unit_square(1))
        state = create_newton_state(
            space,
            MaterialParams(100e6, 0.15, 50.0),
            make_example("1a").boundary_conditions(),
            SolverConfig(),
        )
        assert state["iteration"] == 0
        assert state["residual_history"] == []
        assert state["alpha_history"] == []
        assert state["u"].shape == (space.n_dofs,)
        assert state["constraints"].dofs.size > 0


class TestRunState:
    """Test cases for RunState."""

    def test_run_state_structure(self):
        """Test RunState declares inputs and results of one run."""
        hints = get_type_hints(RunState)
        keys = (
            "run_config",
            "beta",
            "run_dir",
            "mesh",
            "report",
            "cell_fields",
            "profiles",
            "extrema",
            "files",
        )
        for key in keys:
            assert key in hints

    def test_initial_run_state(self, tmp_path):
        """Test a fresh run state carries only its inputs."""
        state = create_run_state(RunConfig(), -200, tmp_path / "beta_-200")
        assert state["beta"] == -200.0
        assert isinstance(state["beta"], float)
        assert state["run_dir"].endswith("beta_-200")
        assert state["mesh"] is None
        assert state["report"] is None
        assert state["files"] == []
