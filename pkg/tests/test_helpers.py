"""Tests for helper functions."""

import pytest

from src.services.verify import convergence_rows
from src.utils.helpers import (
    beta_dirname,
    format_convergence_table,
    format_extrema_table,
    format_number,
    format_optional,
)


class TestHelpers:
    """Test cases for helper functions."""

    @pytest.mark.parametrize(
        "value, expected",
        [
            (0.0, "0"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.33333333333333331"),
            (1e4, "10000"),
            (-0.1, "-0.10000000000000001"),
        ],
    )
    def test_format_number(self, value, expected):
        """Test seventeen significant digits without trailing zeros."""
        assert format_number(value) == expected

    @pytest.mark.parametrize(
        "beta, expected",
        [
            (-200.0, "beta_-200"),
            (0.0, "beta_0"),
            (-0.0, "beta_0"),
            (50.0, "beta_50"),
            (2.5, "beta_2.5"),
            (50.0000001, "beta_50.0000001"),
            (1234567.0, "beta_1234567"),
            (1234568.0, "beta_1234568"),
        ],
    )
    def test_beta_dirname(self, beta, expected):
        """Test run directory names keep every digit; -0.0 maps to beta_0."""
        assert beta_dirname(beta) == expected

    def test_format_optional(self):
        """Test missing values print as a dash."""
        assert format_optional(None) == "-"
        assert format_optional(2.0) == "2.0000"

    def test_convergence_table(self):
        """Test one header line and one line per cycle."""
        rows = convergence_rows([1, 2], [0.5, 0.25], [4.0, 1.0], [18, 50])
        lines = format_convergence_table(rows).splitlines()
        assert len(lines) == 3
        assert "L2 error" in lines[0]
        assert lines[1].rstrip().endswith("-")
        assert lines[2].rstrip().endswith("2.0000")

    def test_extrema_table(self):
        """Test every quantity is listed."""
        table = format_extrema_table({"T22": (0.25, -0.1), "SED": (290.0, 0.0)})
        assert "T22" in table
        assert "SED" in table
        assert len(table.splitlines()) == 3
