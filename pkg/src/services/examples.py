"""Boundary-value problems on the unit square: the canned examples and custom ones."""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..config.settings import Config
from ..core.errors import ValidationError
from .assembly import BoundaryConditions, DirichletSpec, PointConstraint
from .mesh import BoundaryTag
from .postproc import Segment

# Bottom node pinned in u1 when G1 only carries a roller.
ROLLER_PIN = (0.5, 0.0)


@dataclass(frozen=True)
class ProblemDefinition:
    """Mesh topology and boundary data of one boundary-value problem."""

    name: str
    crack: bool
    dirichlet: Dict[BoundaryTag, DirichletSpec]
    tractions: Dict[BoundaryTag, Tuple[float, float]]
    points: Tuple[PointConstraint, ...] = ()
    description: str = ""

    def boundary_conditions(self) -> BoundaryConditions:
        """Fresh copy of the boundary data."""
        return BoundaryConditions(
            dict(self.dirichlet), dict(self.tractions), list(self.points)
        )

    @property
    def reference_segment(self) -> Segment:
        """y = 0.5 ahead of the crack tip, or the full width without a crack."""
        if self.crack:
            return Segment(Config.CRACK_Y, 0.0, Config.CRACK_TIP_X)
        return Segment(Config.CRACK_Y, 0.0, 1.0)

    @property
    def tip_x(self) -> Optional[float]:
        return Config.CRACK_TIP_X if self.crack else None


ROLLER = {BoundaryTag.G1: DirichletSpec((1,))}
HINGE = {BoundaryTag.G1: DirichletSpec((0, 1))}

# id -> (crack, load direction on G3 in units of fu, hinge on G1, description)
_EXAMPLES = {
    "1a": (False, (0.0, 1.0), False, "uncracked square, mode-I tension"),
    "1b": (False, (1.0, 0.0), True, "uncracked square, in-plane shear"),
    "2": (True, (0.0, 1.0), False, "edge crack, mode-I tension"),
    "3": (True, (1.0, 0.0), True, "edge crack, mode-II shear"),
    "4": (True, (1.0, 1.0), True, "edge crack, mixed-mode loading"),
}

EXAMPLE_IDS = tuple(_EXAMPLES)


def make_example(
    example_id: str, fu: float = Config.DEFAULT_TRACTION
) -> ProblemDefinition:
    """Canned example with the top traction scaled by fu (Pa)."""
    key = str(example_id).strip().lower()
    if key not in _EXAMPLES:
        raise ValidationError(
            "example",
            f"unknown example {example_id!r}; expected one of {EXAMPLE_IDS}",
        )

    crack, direction, hinge, description = _EXAMPLES[key]
    traction = (direction[0] * fu, direction[1] * fu)
    points = () if hinge else (PointConstraint(ROLLER_PIN, 0),)
    return ProblemDefinition(
        name=key,
        crack=crack,
        dirichlet=dict(HINGE if hinge else ROLLER),
        tractions={BoundaryTag.G3: traction},
        points=points,
        description=description,
    )
