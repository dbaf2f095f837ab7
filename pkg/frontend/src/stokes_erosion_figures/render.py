"""Deterministic figure rendering from validated CSV tables."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import schemas
from .schemas import SchemaError

# Fixed rendering parameters so output bytes are reproducible across runs.
_RC = {
    "svg.hashsalt": "stokes-erosion-figures",
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
}


def _save(fig, path: Path) -> None:
    metadata = {"Date": None} if path.suffix == ".svg" else {"Software": None}
    fig.savefig(path, metadata=metadata)
    plt.close(fig)


def render_snapshots(indir: str | Path, outdir: str | Path, fmt: str = "png") -> Path:
    """Overlay of body boundaries from every snapshot, colored by step."""
    indir, outdir = Path(indir), Path(outdir)
    paths = sorted(indir.glob("snapshot_*.csv"))
    if not paths:
        raise SchemaError(f"{indir}: no snapshot_*.csv files")
    steps = [int(p.stem.split("_")[1]) for p in paths]
    span = max(steps) - min(steps) or 1

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        cmap = plt.get_cmap("viridis")
        for path, step in zip(paths, steps):
            tab = schemas.read_snapshot(path)
            color = cmap((step - min(steps)) / span)
            for body in np.unique(tab["body_id"]):
                sel = tab["body_id"] == body
                x = np.append(tab["x"][sel], tab["x"][sel][0])
                y = np.append(tab["y"][sel], tab["y"][sel][0])
                ax.plot(x, y, color=color, linewidth=1.0)
        sm = plt.cm.ScalarMappable(
            cmap=cmap, norm=plt.Normalize(min(steps), max(steps))
        )
        fig.colorbar(sm, ax=ax, label="step")
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title("boundary snapshots")
        out = outdir / f"snapshots.{fmt}"
        _save(fig, out)
    return out


def render_fields(indir: str | Path, outdir: str | Path, fmt: str = "png") -> Path:
    """Vorticity and pressure panels on the sampling grid, solid cells masked."""
    indir, outdir = Path(indir), Path(outdir)
    tab = schemas.read_fields(indir / "fields.csv")
    xu, yu = np.unique(tab["x"]), np.unique(tab["y"])
    if len(xu) * len(yu) != len(tab["x"]):
        raise SchemaError(f"{indir / 'fields.csv'}: points do not form a grid")

    ix = np.searchsorted(xu, tab["x"])
    iy = np.searchsorted(yu, tab["y"])

    def grid(name):
        g = np.full((len(yu), len(xu)), np.nan)
        g[iy, ix] = tab[name]
        return g

    solid = grid("inside") > 0.5
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
        for ax, name, label in zip(axes, ("omega", "p"), ("vorticity", "pressure")):
            g = grid(name)
            g[solid] = np.nan
            pm = ax.pcolormesh(xu, yu, g, shading="nearest", cmap="RdBu_r")
            fig.colorbar(pm, ax=ax, label=label)
            ax.set_aspect("equal")
            ax.set_ylabel("y")
        axes[-1].set_xlabel("x")
        out = outdir / f"fields.{fmt}"
        _save(fig, out)
    return out


def render_series(
    indir: str | Path, outdir: str | Path, fmt: str = "png", logy: bool = True
) -> Path:
    """Time series of flow rate, drag, resistance, and solid area fraction.

    The vertical axes are logarithmic by default; values are plotted exactly
    as stored (no resampling or smoothing).
    """
    indir, outdir = Path(indir), Path(outdir)
    tab = schemas.read_series(indir / "series.csv")
    t = tab["t"]
    panels = [
        ("U", tab["U"], "flow rate U"),
        ("FD_x", tab["FD_x"], "drag FD_x"),
        ("resistance", None, "resistance FD_x / (4 pi U)"),
        ("area_fraction", tab["area_fraction"], "solid area fraction"),
    ]
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0), sharex=True)
        for ax, (key, vals, label) in zip(axes.flat, panels):
            if key == "resistance":
                with np.errstate(divide="ignore", invalid="ignore"):
                    vals = tab["FD_x"] / (4.0 * np.pi * tab["U"])
            if logy:
                ax.semilogy(t, np.abs(vals), linewidth=1.2)
                ax.set_ylabel(f"|{label}|")
            else:
                ax.plot(t, vals, linewidth=1.2)
                ax.set_ylabel(label)
        for ax in axes[-1]:
            ax.set_xlabel("t")
        fig.tight_layout()
        out = outdir / f"series.{fmt}"
        _save(fig, out)
    return out


def render_convergence(indir: str | Path, outdir: str | Path, fmt: str = "png") -> Path:
    """Formatted order table echoing the convergence CSV values exactly."""
    indir, outdir = Path(indir), Path(outdir)
    rows = schemas.read_convergence_raw(indir / "convergence.csv")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7.0, 0.6 + 0.35 * len(rows)))
        ax.axis("off")
        table = ax.table(
            cellText=rows,
            colLabels=schemas.CONVERGENCE_COLUMNS,
            loc="center",
            cellLoc="center",
        )
        table.scale(1.0, 1.4)
        ax.set_title("temporal convergence")
        out = outdir / f"convergence.{fmt}"
        _save(fig, out)
    return out
