"""CSV schema validation for the simulator's documented output files."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

# Documented headers of the simulator's CSV artifacts.
SNAPSHOT_COLUMNS = ["body_id", "alpha", "x", "y", "kappa", "tau"]
SERIES_COLUMNS = [
    "t",
    "U",
    "FD_x",
    "FD_y",
    "FD_pressure_x",
    "FD_viscous_x",
    "area_fraction",
]
FIELD_COLUMNS = ["x", "y", "inside", "omega", "p", "u", "v"]
CONVERGENCE_COLUMNS = ["dt", "l2_shape_difference", "order", "flag"]


class SchemaError(ValueError):
    """A CSV file does not match its documented schema."""


def read_table(
    path: str | Path,
    columns: list[str],
    numeric: list[str] | None = None,
    allow_empty: bool = False,
) -> dict[str, np.ndarray]:
    """Read a CSV file and validate it against the expected header.

    Returns a column-name -> array mapping. Columns listed in ``numeric``
    (all of them by default) are parsed as floats; the rest are kept as
    strings. Schema violations raise SchemaError naming the offending column.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {columns}")
        rows = list(reader)

    for name in columns:
        if name not in header:
            raise SchemaError(f"{path}: missing required column '{name}'")
    for name in header:
        if name not in columns:
            raise SchemaError(f"{path}: unexpected column '{name}'")
    if header != columns:
        raise SchemaError(
            f"{path}: columns out of order, expected {columns}, got {header}"
        )
    if not rows and not allow_empty:
        raise SchemaError(f"{path}: no data rows")
    for i, row in enumerate(rows):
        if len(row) != len(columns):
            raise SchemaError(
                f"{path}: row {i + 2} has {len(row)} fields, expected {len(columns)}"
            )

    numeric = columns if numeric is None else numeric
    table: dict[str, np.ndarray] = {}
    for j, name in enumerate(columns):
        raw = [row[j] for row in rows]
        if name in numeric:
            try:
                table[name] = np.array([float(v) for v in raw])
            except ValueError:
                bad = next(v for v in raw if not _is_float(v))
                raise SchemaError(
                    f"{path}: non-numeric value {bad!r} in column '{name}'"
                )
        else:
            table[name] = np.array(raw, dtype=object)
    return table


def _is_float(value: str) -> bool:
    try:
        float(value)
    except ValueError:
        return False
    return True


def read_snapshot(path: str | Path) -> dict[str, np.ndarray]:
    return read_table(path, SNAPSHOT_COLUMNS)


def read_series(path: str | Path) -> dict[str, np.ndarray]:
    return read_table(path, SERIES_COLUMNS)


def read_fields(path: str | Path) -> dict[str, np.ndarray]:
    return read_table(path, FIELD_COLUMNS)


def read_convergence(path: str | Path) -> dict[str, np.ndarray]:
    # flag is a status string; keep raw strings for dt/err/order as well so
    # the rendered table can echo the CSV values exactly.
    return read_table(
        path,
        CONVERGENCE_COLUMNS,
        numeric=["dt", "l2_shape_difference", "order"],
    )


def read_convergence_raw(path: str | Path) -> list[list[str]]:
    """Convergence rows as raw strings (after schema validation)."""
    read_convergence(path)  # validate
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [row for row in reader]
