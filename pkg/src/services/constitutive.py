"""Density-dependent elastic model: stress law, tangent, inverse and derived fields.

Every function works pointwise and broadcasts: tensor components may be
floats or arrays of any common shape, so the same code serves single states
and whole quadrature grids.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..config.settings import Config
from ..core.errors import (
    NonphysicalCompaction,
    SingularDensityFactor,
    SingularInversion,
    ValidationError,
)

Scalar = Union[float, np.ndarray]


@dataclass(frozen=True)
class MaterialParams:
    """Young's modulus E (Pa), Poisson ratio nu and nonlinear parameter beta."""

    E: float
    nu: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        if not self.E > 0:
            raise ValidationError("E", f"must be positive, got {self.E}")
        if not -1.0 < self.nu < 0.5:
            raise ValidationError("nu", f"must lie in (-1, 0.5), got {self.nu}")
        if not np.isfinite(self.beta):
            raise ValidationError("beta", f"must be finite, got {self.beta}")

    @property
    def c1(self) -> float:
        return self.E / (1.0 + self.nu)

    @property
    def c2(self) -> float:
        return self.nu * self.E / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))

    @property
    def linear(self) -> "MaterialParams":
        """The same material with beta = 0."""
        return MaterialParams(self.E, self.nu, 0.0)


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric 2x2 tensor stored as (xx, yy, xy)."""

    xx: Scalar
    yy: Scalar
    xy: Scalar

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "SymTensor2":
        m = np.asarray(m, dtype=float)
        return cls(m[..., 0, 0], m[..., 1, 1], 0.5 * (m[..., 0, 1] + m[..., 1, 0]))

    @classmethod
    def identity(cls) -> "SymTensor2":
        return cls(1.0, 1.0, 0.0)

    @property
    def trace(self) -> Scalar:
        return self.xx + self.yy

    def __add__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2(self.xx + other.xx, self.yy + other.yy, self.xy + other.xy)

    def __sub__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2(self.xx - other.xx, self.yy - other.yy, self.xy - other.xy)

    def scale(self, factor: Scalar) -> "SymTensor2":
        return SymTensor2(factor * self.xx, factor * self.yy, factor * self.xy)

    def ddot(self, other: "SymTensor2") -> Scalar:
        return self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy

    def as_matrix(self) -> np.ndarray:
        xx, yy, xy = np.broadcast_arrays(
            np.asarray(self.xx, dtype=float),
            np.asarray(self.yy, dtype=float),
            np.asarray(self.xy, dtype=float),
        )
        rows = [np.stack([xx, xy], axis=-1), np.stack([xy, yy], axis=-1)]
        return np.stack(rows, axis=-2)


Strain2 = SymTensor2
Stress2 = SymTensor2


def strain(grad_u: np.ndarray) -> Strain2:
    """Symmetric part of a displacement gradient (..., 2, 2)."""
    return SymTensor2.from_matrix(grad_u)


def density_factor(eps: Strain2, params: MaterialParams) -> Scalar:
    """1 + beta tr(eps), checked against the singularity guard.

    For array input the reported location is the index of the first
    offending entry.
    """
    factor = 1.0 + params.beta * eps.trace
    bad = ~(np.asarray(factor) > Config.DENSITY_SINGULARITY_GUARD)
    if np.any(bad):
        if np.ndim(factor) == 0:
            raise SingularDensityFactor(float(factor))
        index = np.unravel_index(int(np.argmax(bad)), np.shape(factor))
        location = tuple(int(i) for i in index)
        raise SingularDensityFactor(float(np.asarray(factor)[index]), location)
    return factor


def elasticity_apply(eps: Strain2, params: MaterialParams) -> Stress2:
    """Linear operator E[eps] = c1 eps + c2 tr(eps) I."""
    volumetric = params.c2 * eps.trace
    return SymTensor2(
        params.c1 * eps.xx + volumetric,
        params.c1 * eps.yy + volumetric,
        params.c1 * eps.xy,
    )


def cauchy_stress(eps: Strain2, params: MaterialParams) -> Stress2:
    """T = E[eps] / (1 + beta tr(eps))."""
    factor = density_factor(eps, params)
    return elasticity_apply(eps, params).scale(1.0 / factor)


def invert_stress(stress: Stress2, params: MaterialParams) -> Strain2:
    """Exact algebraic inverse of cauchy_stress."""
    bulk = params.c1 + 2.0 * params.c2
    denominator = bulk - params.beta * stress.trace
    if np.any(np.abs(denominator) <= Config.DENSITY_SINGULARITY_GUARD * bulk):
        raise SingularInversion(
            "(c1 + 2 c2) - beta tr(T) vanishes; stress is not attainable"
        )

    trace_eps = stress.trace / denominator
    factor = 1.0 + params.beta * trace_eps
    volumetric = params.c2 * stress.trace / (params.c1 * bulk)
    return SymTensor2(
        factor * (stress.xx / params.c1 - volumetric),
        factor * (stress.yy / params.c1 - volumetric),
        factor * stress.xy / params.c1,
    )


def tangent_apply(
    eps_n: Strain2, grad_delta: np.ndarray, params: MaterialParams
) -> Stress2:
    """Directional derivative of cauchy_stress at eps_n along grad_delta."""
    factor = density_factor(eps_n, params)
    d_eps = strain(grad_delta)
    divergence = d_eps.trace
    first = elasticity_apply(d_eps, params).scale(1.0 / factor)
    second = elasticity_apply(eps_n, params).scale(params.beta * divergence / factor**2)
    return first - second


def strain_energy_density(eps: Strain2, params: MaterialParams) -> Scalar:
    """SED = 1/2 T : eps."""
    return 0.5 * cauchy_stress(eps, params).ddot(eps)


def bulk_modulus(eps: Strain2, params: MaterialParams) -> Scalar:
    """Drained bulk modulus (c2 + c1/3) / (1 + beta tr(eps))."""
    factor = density_factor(eps, params)
    linear = params.nu * params.E / ((1.0 + params.nu) * (1.0 - 2.0 * params.nu))
    linear += params.E / (3.0 * (1.0 + params.nu))
    return linear / factor


def lame_nonlinear(eps: Strain2, params: MaterialParams) -> Tuple[Scalar, Scalar]:
    """Density-scaled Lame coefficients (lambda, mu)."""
    factor = density_factor(eps, params)
    return params.c2 / factor, 0.5 * params.c1 / factor


def density_ratio(eps: Strain2) -> Scalar:
    """rho / rho_0 = 1 / (1 + tr(eps)) from the balance of mass."""
    volume = 1.0 + eps.trace
    if np.any(np.asarray(volume) <= 0.0):
        raise NonphysicalCompaction(
            f"1 + tr(eps) = {np.min(volume):.3e} is not positive"
        )
    return 1.0 / volume
