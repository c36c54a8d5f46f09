"""Configuration settings for the density-dependent FE solver."""

from typing import Dict, Tuple


class Config:
    """Application configuration constants."""

    # Mesh settings
    DEFAULT_REFINEMENTS = 7
    MAX_REFINEMENTS = 12
    GEOMETRY_TOLERANCE = 1e-10

    # Crack geometry (horizontal slit from the tip to the right boundary)
    CRACK_Y = 0.5
    CRACK_TIP_X = 0.5
    CRACK_END_X = 1.0

    # Material settings (SI units)
    DEFAULT_YOUNGS_MODULUS = 100e6
    DEFAULT_POISSON_RATIO = 0.15
    DEFAULT_TRACTION = 1e4
    DEFAULT_BETAS = (-200.0, -50.0, 0.0, 50.0, 200.0)
    DENSITY_SINGULARITY_GUARD = 1e-8

    # Newton and line search settings
    NEWTON_TOL = 1e-8
    MAX_NEWTON = 50
    ALPHA_BAR = 1.0
    LINE_SEARCH_FACTOR = 0.5
    MAX_LINE_SEARCH = 10
    SINGULAR_PIVOT_RATIO = 1e-12

    # Manufactured solution settings
    MANUFACTURED_BETA = 1.0
    MANUFACTURED_YOUNGS_MODULUS = 100.0
    MANUFACTURED_POISSON_RATIO = 0.1
    CONVERGENCE_CYCLES = 6

    # Unit suffixes accepted in configuration files
    UNIT_FACTORS: Dict[str, float] = {
        "Pa": 1.0,
        "kPa": 1e3,
        "MPa": 1e6,
        "GPa": 1e9,
    }

    # Output settings
    CSV_SIGNIFICANT_DIGITS = 17
    DEFAULT_OUTPUT_DIR = "results"
    DEFAULT_CELL_FIELDS: Tuple[str, ...] = (
        "T11",
        "T22",
        "T21",
        "eps11",
        "eps22",
        "eps21",
        "SED",
        "K_dr",
        "trace_strain",
        "density_ratio",
    )
    DEFAULT_PROFILES: Tuple[str, ...] = (
        "K_I",
        "K_II",
        "K_dr",
        "trace_strain",
        "u1",
        "u2",
    )

    # Threading settings
    MAX_WORKERS = 3
