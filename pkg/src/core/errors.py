"""Exception hierarchy for the density-dependent FE solver."""

from typing import Any, Optional


class FemError(Exception):
    """Base class for every error raised by the solver package."""


class SegmentNotOnGrid(FemError):
    """A crack or sampling segment does not run along mesh edges."""


class UnknownTag(FemError):
    """A boundary tag is not one of the known tags or has no edges."""


class DegenerateCell(FemError):
    """A cell has a non-positive Jacobian determinant."""

    def __init__(self, cell: int, jacobian_det: float):
        self.cell = cell
        self.jacobian_det = jacobian_det
        super().__init__(
            f"Cell {cell} is degenerate or inverted (det J = {jacobian_det:.3e})"
        )


class SingularDensityFactor(FemError):
    """The density factor 1 + beta tr(eps) left its admissible range."""

    def __init__(self, value: float, location: Optional[Any] = None):
        self.value = value
        self.location = location
        where = f" at {location}" if location is not None else ""
        super().__init__(f"Density factor 1 + beta tr(eps) = {value:.3e}{where}")


class SingularInversion(FemError):
    """The stress-to-strain inversion has a vanishing denominator."""


class NonphysicalCompaction(FemError):
    """Volumetric strain tr(eps) <= -1 gives a non-positive volume."""


class SingularMatrix(FemError):
    """The linear system could not be factorized."""


class NotConverged(FemError):
    """Newton iteration hit its cap before reaching the tolerance."""

    def __init__(self, report: Any):
        self.report = report
        super().__init__(
            f"Newton did not converge in {report.iterations} iterations "
            f"(residual {report.residual_history[-1]:.3e})"
        )


class ConfigError(FemError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """The configuration text is malformed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ValidationError(ConfigError):
    """A configuration value is out of range."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class OutputError(FemError):
    """Reading a configuration file or writing a result file failed."""
