"""Run configuration files: INI sections [mesh] [material] [solver] [bc] [output]."""

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..core.errors import OutputError, ParseError, UnknownTag, ValidationError
from ..services.assembly import DirichletSpec, PointConstraint
from ..services.constitutive import MaterialParams
from ..services.examples import EXAMPLE_IDS, ProblemDefinition, make_example
from ..services.mesh import BoundaryTag, parse_tag
from ..services.postproc import Quantity
from ..services.solver import SolverConfig
from ..utils.helpers import beta_dirname
from .settings import Config

SECTION_KEYS = {
    "mesh": {"refinements", "crack"},
    "material": {"e", "nu", "beta"},
    "solver": {
        "tol",
        "max_newton",
        "alpha_bar",
        "line_search_factor",
        "max_line_search",
    },
    "bc": {"example", "fu"},
    "output": {"directory", "fields", "profiles"},
}
CUSTOM_BC_PREFIXES = ("dirichlet.", "traction.", "pin.")
PROFILE_NAMES = {q.value for q in Quantity} | {"K_I", "K_II", "u1", "u2"}
COMPONENTS = {"u1": 0, "u2": 1}

_NUMBER_WITH_UNIT = re.compile(
    r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z]*)\s*$"
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one run or sweep needs."""

    problem: ProblemDefinition = field(default_factory=lambda: make_example("2"))
    refinements: int = Config.DEFAULT_REFINEMENTS
    youngs_modulus: float = Config.DEFAULT_YOUNGS_MODULUS
    poisson_ratio: float = Config.DEFAULT_POISSON_RATIO
    traction: float = Config.DEFAULT_TRACTION
    betas: Tuple[float, ...] = Config.DEFAULT_BETAS
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = Config.DEFAULT_OUTPUT_DIR
    fields: Tuple[str, ...] = Config.DEFAULT_CELL_FIELDS
    profiles: Tuple[str, ...] = Config.DEFAULT_PROFILES

    def __post_init__(self) -> None:
        if not self.betas:
            raise ValidationError("beta", "at least one value is required")
        names = [beta_dirname(beta) for beta in self.betas]
        if len(set(names)) != len(names):
            raise ValidationError(
                "beta", f"values must be distinct, got {list(self.betas)}"
            )
        # y = 0.5 is a grid line only from one refinement on
        if not 1 <= self.refinements <= Config.MAX_REFINEMENTS:
            raise ValidationError(
                "refinements", f"must lie in [1, {Config.MAX_REFINEMENTS}]"
            )
        quantities = {q.value for q in Quantity}
        unknown = [name for name in self.fields if name not in quantities]
        if unknown:
            raise ValidationError("fields", f"unknown quantities {unknown}")
        unknown = [name for name in self.profiles if name not in PROFILE_NAMES]
        if unknown:
            raise ValidationError("profiles", f"unknown profiles {unknown}")
        for beta in self.betas:
            self.material(beta)

    def material(self, beta: float) -> MaterialParams:
        return MaterialParams(self.youngs_modulus, self.poisson_ratio, beta)

    def with_overrides(
        self,
        example: Optional[str] = None,
        betas: Optional[List[float]] = None,
        refinements: Optional[int] = None,
        output_dir: Optional[str] = None,
    ) -> "RunConfig":
        """Apply command-line overrides."""
        changes: Dict[str, object] = {}
        if example is not None:
            changes["problem"] = make_example(example, self.traction)
        if betas:
            changes["betas"] = tuple(betas)
        if refinements is not None:
            changes["refinements"] = refinements
        if output_dir is not None:
            changes["output_dir"] = output_dir
        return replace(self, **changes) if changes else self


def parse_quantity(text: str, field_name: str) -> float:
    """Number with an optional Pa/kPa/MPa/GPa suffix, in Pa."""
    match = _NUMBER_WITH_UNIT.match(text)
    if not match:
        raise ValidationError(field_name, f"not a number: {text!r}")
    number, unit = match.groups()
    if unit and unit not in Config.UNIT_FACTORS:
        raise ValidationError(field_name, f"unknown unit {unit!r}")
    try:
        return float(number) * Config.UNIT_FACTORS.get(unit, 1.0)
    except ValueError:
        raise ValidationError(field_name, f"not a number: {text!r}") from None


def _split(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse_int(text: str, field_name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValidationError(field_name, f"not an integer: {text!r}") from None


def _parse_bool(section: configparser.SectionProxy, key: str) -> bool:
    try:
        return section.getboolean(key)
    except ValueError:
        raise ValidationError(key, f"not a boolean: {section[key]!r}") from None


def _parse_dirichlet(text: str, field_name: str) -> DirichletSpec:
    components, values = [], [0.0, 0.0]
    for item in _split(text):
        name, _, value = item.partition("=")
        name = name.strip().lower()
        if name not in COMPONENTS or not value.strip():
            raise ValidationError(
                field_name, f"expected 'u1=<v>, u2=<v>', got {text!r}"
            )
        components.append(COMPONENTS[name])
        values[COMPONENTS[name]] = parse_quantity(value, field_name)
    if not components:
        raise ValidationError(field_name, "no component given")
    return DirichletSpec(tuple(sorted(set(components))), (values[0], values[1]))


def _parse_pair(text: str, field_name: str) -> Tuple[float, float]:
    items = _split(text)
    if len(items) != 2:
        raise ValidationError(field_name, f"expected two values, got {text!r}")
    return parse_quantity(items[0], field_name), parse_quantity(items[1], field_name)


def _parse_tag(key: str) -> BoundaryTag:
    try:
        return parse_tag(key.split(".", 1)[1])
    except UnknownTag as exc:
        raise ValidationError(key, str(exc)) from None


def _parse_custom_problem(
    bc: configparser.SectionProxy, crack: bool
) -> ProblemDefinition:
    dirichlet, tractions, points = {}, {}, []
    for key, value in bc.items():
        if key.startswith("dirichlet."):
            dirichlet[_parse_tag(key)] = _parse_dirichlet(value, key)
        elif key.startswith("traction."):
            tractions[_parse_tag(key)] = _parse_pair(value, key)
        elif key.startswith("pin."):
            component = key.split(".", 1)[1]
            if component not in COMPONENTS:
                raise ValidationError(key, "pin component must be u1 or u2")
            point = _parse_pair(value, key)
            points.append(PointConstraint(point, COMPONENTS[component]))
    if not dirichlet and not points:
        raise ValidationError(
            "bc", "a custom problem needs a dirichlet.<tag> or pin.<u1|u2> entry"
        )
    problem = ProblemDefinition(
        "custom", crack, dirichlet, tractions, tuple(points), "custom problem"
    )
    try:
        problem.boundary_conditions()
    except ValueError as exc:
        raise ValidationError("bc", str(exc)) from None
    return problem


def _read(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside of a section", exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line) from exc
    except (
        configparser.DuplicateSectionError,
        configparser.DuplicateOptionError,
    ) as exc:
        raise ParseError(exc.message, exc.lineno) from exc
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc
    return parser


def parse_config(text: str) -> RunConfig:
    """Validated RunConfig; an empty text is the Example 2 preset."""
    parser = _read(text)

    for name in parser.sections():
        if name not in SECTION_KEYS:
            raise ValidationError(name, "unknown section")
        for key in parser[name]:
            custom = name == "bc" and key.startswith(CUSTOM_BC_PREFIXES)
            if key not in SECTION_KEYS[name] and not custom:
                raise ValidationError(f"{name}.{key}", "unknown key")

    mesh = parser["mesh"] if parser.has_section("mesh") else {}
    material = parser["material"] if parser.has_section("material") else {}
    solver = parser["solver"] if parser.has_section("solver") else {}
    bc = parser["bc"] if parser.has_section("bc") else {}
    output = parser["output"] if parser.has_section("output") else {}

    fu = parse_quantity(bc["fu"], "fu") if "fu" in bc else Config.DEFAULT_TRACTION
    custom = any(key.startswith(CUSTOM_BC_PREFIXES) for key in bc)
    if custom and "example" in bc:
        raise ValidationError(
            "bc.example", "cannot be combined with custom boundary conditions"
        )

    if custom:
        crack = _parse_bool(mesh, "crack") if "crack" in mesh else False
        problem = _parse_custom_problem(bc, crack)
    else:
        example = bc.get("example", "2")
        if example.strip().lower() not in EXAMPLE_IDS:
            raise ValidationError(
                "example", f"expected one of {EXAMPLE_IDS}, got {example!r}"
            )
        problem = make_example(example, fu)
        if "crack" in mesh:
            problem = replace(problem, crack=_parse_bool(mesh, "crack"))

    kwargs: Dict[str, object] = {"problem": problem, "traction": fu}
    if "refinements" in mesh:
        kwargs["refinements"] = _parse_int(mesh["refinements"], "refinements")
    if "e" in material:
        kwargs["youngs_modulus"] = parse_quantity(material["e"], "E")
    if "nu" in material:
        kwargs["poisson_ratio"] = parse_quantity(material["nu"], "nu")
    if "beta" in material:
        betas = _split(material["beta"])
        kwargs["betas"] = tuple(parse_quantity(b, "beta") for b in betas)

    solver_kwargs: Dict[str, object] = {}
    if "tol" in solver:
        solver_kwargs["newton_tol"] = parse_quantity(solver["tol"], "tol")
    for key in ("alpha_bar", "line_search_factor"):
        if key in solver:
            solver_kwargs[key] = parse_quantity(solver[key], key)
    for key in ("max_newton", "max_line_search"):
        if key in solver:
            solver_kwargs[key] = _parse_int(solver[key], key)
    kwargs["solver"] = SolverConfig(**solver_kwargs)

    if "directory" in output:
        kwargs["output_dir"] = output["directory"].strip()
    if "fields" in output:
        kwargs["fields"] = tuple(_split(output["fields"]))
    if "profiles" in output:
        kwargs["profiles"] = tuple(_split(output["profiles"]))

    return RunConfig(**kwargs)


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read and parse a configuration file; an unreadable file is an OutputError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"Cannot read configuration {path}: {exc}") from exc
    return parse_config(text)
