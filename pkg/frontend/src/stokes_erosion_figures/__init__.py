"""Batch figure rendering for stokes-erosion CSV artifacts.

Consumes only the documented CSV files written by the simulator (snapshot
curves, field grids, drag/area time series, convergence tables) and renders
deterministic PNG/SVG figures. Rendering never modifies or resamples the
numeric data.
"""

from .schemas import SchemaError, read_table
from .render import (
    render_convergence,
    render_fields,
    render_series,
    render_snapshots,
)

__all__ = [
    "SchemaError",
    "read_table",
    "render_convergence",
    "render_fields",
    "render_series",
    "render_snapshots",
]
