"""
Text formatting utilities for command-line reports.
"""
from typing import Any, List, Sequence


def format_cell(value: Any) -> str:
    """
    Render one table cell.

    Floats use up to 4 significant decimals in general notation; None renders
    as a dash.
    """
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """
    Format rows as an aligned plain-text table.

    Numeric columns are right-aligned, everything else left-aligned. A
    dashed rule separates the header from the body.

    Args:
        headers: Column titles
        rows: Table rows; each must have len(headers) cells

    Returns:
        The table text without a trailing newline

    Raises:
        ValueError: If a row has the wrong number of cells
    """
    for k, row in enumerate(rows):
        if len(row) != len(headers):
            raise ValueError(f"Row {k} has {len(row)} cells, expected {len(headers)}")
    cells: List[List[str]] = [[format_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    numeric = [
        bool(rows) and all(isinstance(row[c], (int, float)) and not isinstance(row[c], bool) for row in rows)
        for c in range(len(headers))
    ]

    def line(values: Sequence[str]) -> str:
        parts = [v.rjust(w) if num else v.ljust(w) for v, w, num in zip(values, widths, numeric)]
        return "  ".join(parts).rstrip()

    out = [line(list(headers)), "  ".join("-" * w for w in widths)]
    out.extend(line(row) for row in cells)
    return "\n".join(out)
