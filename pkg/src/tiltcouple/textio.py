"""CSV output helpers shared by the data types and the batch driver.

One formatting policy for every file the package writes: header row, ``.``
decimal separator, 17 significant digits so floats round-trip exactly, and
``\n`` line endings regardless of platform so reruns are byte-identical.
"""

from __future__ import annotations

import numpy as np


def fmt(value) -> str:
    """Render one CSV cell."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def csv_lines(header, rows, preamble=()):
    """Assemble lines for a CSV file; preamble lines get a ``#`` prefix."""
    lines = [f"# {p}" for p in preamble]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return lines


def write_csv(path, header, rows, preamble=()):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in csv_lines(header, rows, preamble):
            fh.write(line)
            fh.write("\n")
