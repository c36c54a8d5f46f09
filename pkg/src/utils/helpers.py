"""General helper functions."""

from typing import Dict, Iterable, Optional, Tuple

from ..config.settings import Config


def format_number(value: float) -> str:
    """Round-trippable text for CSV cells."""
    return f"{value:.{Config.CSV_SIGNIFICANT_DIGITS}g}"


def beta_dirname(beta: float) -> str:
    """Run directory name from the shortest repr of beta, e.g. beta_-200."""
    text = repr(float(beta) + 0.0)
    if text.endswith(".0"):
        text = text[:-2]
    return f"beta_{text}"


def format_optional(value: Optional[float], spec: str = ".4f") -> str:
    """Formatted value, or a dash for None."""
    return "-" if value is None else format(value, spec)


def format_convergence_table(rows: Iterable) -> str:
    """Fixed-width convergence table for the console."""
    lines = [
        f"{'cycle':>5}  {'h':>10}  {'dofs':>8}  {'L2 error':>14}  "
        f"{'rate':>7}  {'h-rate':>7}"
    ]
    for row in rows:
        lines.append(
            f"{row.cycle:>5}  {row.h:>10.6g}  {row.n_dofs:>8}  {row.l2_error:>14.6e}  "
            f"{format_optional(row.rate):>7}  {format_optional(row.h_rate):>7}"
        )
    return "\n".join(lines)


def format_extrema_table(extrema: Dict[str, Tuple[float, float]]) -> str:
    """One line per quantity: name, max, min."""
    width = max((len(name) for name in extrema), default=8)
    lines = [f"  {'quantity':<{width}}  {'max':>14}  {'min':>14}"]
    for name, (high, low) in extrema.items():
        lines.append(f"  {name:<{width}}  {high:>14.6e}  {low:>14.6e}")
    return "\n".join(lines)
