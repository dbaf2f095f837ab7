"""Bulk and boundary diagnostics: vorticity, pressure, drag, field grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from . import kernels, spectral, traction
from .bie import DensitySolution
from .domain import FlowDomain
from .nearfield import TOO_CLOSE, evaluate_field, target_rates, upsample_rule  # noqa: F401


@dataclass
class FieldGrid:
    """Regular lattice of field values with an inside-fluid mask."""

    x: np.ndarray  # (nx,)
    y: np.ndarray  # (ny,)
    inside: np.ndarray  # (ny, nx) bool: in fluid and far enough from walls
    omega: np.ndarray
    p: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass
class DragReport:
    total: np.ndarray  # (2,)
    pressure_part: np.ndarray
    viscous_part: np.ndarray


def vorticity(domain: FlowDomain, sol: DensitySolution, targets: np.ndarray):
    """Bulk vorticity via upsampled trapezoid; rotlets contribute nothing."""

    def sing(t):
        if domain.n_bodies == 0:
            return np.zeros(len(t))
        return kernels.stokeslet_vorticity(t, domain.anchors, sol.lam)

    return evaluate_field(domain, sol.eta, targets, kernels.dlp_vorticity, sing)


def boundary_vorticity(domain: FlowDomain, sol: DensitySolution):
    """On no-slip bodies the vorticity equals the shear stress."""
    return traction.shear_stress(domain, sol)


def pressure(domain: FlowDomain, sol: DensitySolution, targets: np.ndarray):
    """Bulk pressure via upsampled trapezoid plus Stokeslet pressure."""

    def sing(t):
        if domain.n_bodies == 0:
            return np.zeros(len(t))
        return kernels.stokeslet_pressure(t, domain.anchors, sol.lam)

    return evaluate_field(domain, sol.eta, targets, kernels.dlp_pressure, sing)


def boundary_pressure(domain: FlowDomain, sol: DensitySolution, component: int):
    """Pressure limit on boundary component (0 = wall, 1+ell = body ell).

    Singularity-subtracted odd-even quadrature for the self component, plain
    trapezoid for the others, plus the jump d eta/ds . ss.
    """
    sl = domain.slices[component]
    parts = [domain.wall] + list(domain.body_samples)
    smp = parts[component]
    targets = smp.points
    n = smp.n

    mask = np.ones(domain.n_points, dtype=bool)
    mask[sl] = False
    p = kernels.dlp_pressure(
        targets,
        domain.points[mask],
        domain.normals[mask],
        sol.eta[mask],
        domain.weights[mask],
    )

    eta = sol.eta[sl]
    ds2 = 2.0 * smp.jacobian
    for parity in (0, 1):
        tsel = np.arange(parity, n, 2)
        ssel = np.arange(1 - parity, n, 2)
        diff = eta[ssel][None, :, :] - eta[tsel][:, None, :]
        r = targets[tsel][:, None, :] - targets[ssel][None, :, :]
        rho2 = np.einsum("tsa,tsa->ts", r, r)
        rn = np.einsum("tsa,sa->ts", r, smp.normal[ssel])
        re = np.einsum("tsa,tsa->ts", r, diff)
        ne = np.einsum("sa,tsa->ts", smp.normal[ssel], diff)
        val = (ne - 2.0 * rn * re / rho2) / rho2
        p[tsel] += -np.sum(val, axis=1) / np.pi * ds2

    scale = 2.0 * np.pi / smp.L
    deta = np.column_stack(
        [spectral.diff(eta[:, 0]) * scale, spectral.diff(eta[:, 1]) * scale]
    )
    p += np.einsum("ia,ia->i", deta, smp.tangent)
    if domain.n_bodies:
        p += kernels.stokeslet_pressure(targets, domain.anchors, sol.lam)
    return p


def averaged_pressures(domain: FlowDomain, sol: DensitySolution, x_stations=(-2.0, 2.0)):
    """Vertically averaged pressures p-+ at the upstream/downstream stations.

    Gauss-Legendre (32 nodes) on y in [-1, 1]. Nodes that land inside the
    too-close band of the wall take the on-wall pressure limit at the nearest
    wall point (the pressure is continuous up to the boundary).
    """
    nodes, weights = roots_legendre(32)
    p_wall = None
    out = []
    for xs in x_stations:
        targets = np.column_stack([np.full(32, xs), nodes])
        rates = target_rates(domain, targets)
        vals, ok = pressure(domain, sol, targets)
        if np.any(rates == TOO_CLOSE):
            if p_wall is None:
                p_wall = boundary_pressure(domain, sol, 0)
            for i in np.flatnonzero(rates == TOO_CLOSE):
                dw = np.sum((domain.wall.points - targets[i]) ** 2, axis=1)
                vals[i] = p_wall[np.argmin(dw)]
        out.append(0.5 * float(weights @ vals))
    return tuple(out)


def drag(domain: FlowDomain, sol: DensitySolution, body_index: int) -> DragReport:
    """Drag on one body, F = sum (p n + tau ss) ds, with the split reported."""
    smp = domain.body_samples[body_index]
    p = boundary_pressure(domain, sol, 1 + body_index)
    tau = traction.shear_stress(domain, sol)[body_index]
    ds = smp.jacobian
    fp = ds * np.einsum("i,ia->a", p, smp.normal)
    fv = ds * np.einsum("i,ia->a", tau, smp.tangent)
    return DragReport(total=fp + fv, pressure_part=fp, viscous_part=fv)


def total_drag(domain: FlowDomain, sol: DensitySolution) -> DragReport:
    reports = [drag(domain, sol, ell) for ell in range(domain.n_bodies)]
    z = np.zeros(2)
    return DragReport(
        total=sum((r.total for r in reports), z.copy()),
        pressure_part=sum((r.pressure_part for r in reports), z.copy()),
        viscous_part=sum((r.viscous_part for r in reports), z.copy()),
    )


def _point_in_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd rule winding test, vectorized over points."""
    x, y = points[:, 0], points[:, 1]
    px, py = poly[:, 0], poly[:, 1]
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    inside = np.zeros(len(points), dtype=bool)
    for i in range(len(poly)):
        cond = (py[i] > y) != (qy[i] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = (qx[i] - px[i]) * (y - py[i]) / (qy[i] - py[i]) + px[i]
        inside ^= cond & (x < xint)
    return inside


def in_fluid(domain: FlowDomain, points: np.ndarray) -> np.ndarray:
    inside = _point_in_polygon(points, domain.wall.points)
    for smp in domain.body_samples:
        inside &= ~_point_in_polygon(points, smp.points)
    return inside


def field_grid(
    domain: FlowDomain,
    sol: DensitySolution,
    nx: int = 100,
    ny: int = 40,
    bounds=(-3.0, 3.0, -1.0, 1.0),
) -> FieldGrid:
    """Velocity, vorticity, and pressure on a regular visualization grid.

    Points outside the fluid or inside the too-close band carry 0 and an
    explicit mask flag.
    """
    xs = np.linspace(bounds[0], bounds[1], nx)
    ys = np.linspace(bounds[2], bounds[3], ny)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    fluid = in_fluid(domain, pts)
    omega = np.zeros(len(pts))
    p = np.zeros(len(pts))
    uv = np.zeros((len(pts), 2))
    ok = np.zeros(len(pts), dtype=bool)
    if np.any(fluid):
        sub = pts[fluid]
        om, ok1 = vorticity(domain, sol, sub)
        pr, _ = pressure(domain, sol, sub)
        from .bie import evaluate_velocity

        vel, _ = evaluate_velocity(domain, sol, sub)
        omega[fluid] = om
        p[fluid] = np.where(ok1, pr, 0.0)
        uv[fluid] = np.where(ok1[:, None], vel, 0.0)
        okf = np.zeros(len(pts), dtype=bool)
        okf[np.flatnonzero(fluid)] = ok1
        ok = okf
    shape = (ny, nx)
    return FieldGrid(
        x=xs,
        y=ys,
        inside=ok.reshape(shape),
        omega=omega.reshape(shape),
        p=p.reshape(shape),
        u=uv[:, 0].reshape(shape),
        v=uv[:, 1].reshape(shape),
    )


def write_field_csv(path, grid: FieldGrid) -> None:
    """Field grid CSV: x,y,inside,omega,p,u,v."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "inside", "omega", "p", "u", "v"])
        for j, yv in enumerate(grid.y):
            for i, xv in enumerate(grid.x):
                w.writerow(
                    [
                        repr(float(xv)),
                        repr(float(yv)),
                        int(grid.inside[j, i]),
                        repr(float(grid.omega[j, i])),
                        repr(float(grid.p[j, i])),
                        repr(float(grid.u[j, i])),
                        repr(float(grid.v[j, i])),
                    ]
                )
