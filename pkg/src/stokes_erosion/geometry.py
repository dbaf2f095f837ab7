"""Closed-curve geometry in the tangent-angle / perimeter representation.

A body is stored as the spectrum of the periodic part of its tangent angle
theta(alpha) = alpha + p(alpha), its perimeter L, and the surface-mean
reference point. Curves are counterclockwise; normals on bodies point into
the body (out of the fluid), normals on the channel wall point out of the
channel, matching the flow solver's jump conventions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral
from .spectral import gaussian_filter as spectral_filter  # noqa: F401  (public op)

CLOSURE_TOL = 1e-10
CLOSURE_WARN = 1e-6
RESAMPLE_TOL = 1e-12
RESAMPLE_MAX_ITERS = 50


class GeometryError(RuntimeError):
    """Corrupted or invalid curve state."""


@dataclass
class BodyState:
    """One closed curve in tangent-angle form."""

    theta_hat: np.ndarray  # spectrum of theta(alpha) - alpha, FFT layout
    L: float
    x_mean: np.ndarray  # shape (2,)
    alive: bool = True

    @property
    def n(self) -> int:
        return len(self.theta_hat)

    def copy(self) -> "BodyState":
        return replace(
            self,
            theta_hat=self.theta_hat.copy(),
            x_mean=np.asarray(self.x_mean, dtype=float).copy(),
        )


@dataclass
class CurveSamples:
    """Collocation samples of a closed curve.

    ``kappa`` is the tangent-angle curvature (positive for a convex
    counterclockwise curve). ``is_body`` records whether the normal points
    into the curve's interior (eroding body) or out of it (channel wall).
    """

    points: np.ndarray  # (n, 2)
    tangent: np.ndarray  # (n, 2), unit, counterclockwise
    normal: np.ndarray  # (n, 2), unit, out of the fluid
    kappa: np.ndarray  # (n,)
    jacobian: float  # ds per node, L/n
    h: float  # arclength spacing, == jacobian
    L: float
    is_body: bool = True
    alpha: np.ndarray = field(default=None)  # type: ignore[assignment]

    @property
    def n(self) -> int:
        return len(self.points)


def _theta_values(body: BodyState) -> np.ndarray:
    n = body.n
    alpha = 2.0 * np.pi * np.arange(n) / n
    return alpha + spectral.from_spectrum(body.theta_hat)


def closure_defect(body: BodyState) -> float:
    """Norm of the mean unit tangent; zero for an exactly closed curve."""
    theta = _theta_values(body)
    return float(np.hypot(np.mean(np.cos(theta)), np.mean(np.sin(theta))))


def project_closure(body: BodyState, tol: float = CLOSURE_TOL) -> BodyState:
    """Zero the mean tangent by a minimal-norm correction of the k=+-1 modes.

    Newton iteration on the two real degrees of freedom (a, b) perturbing
    theta by a*cos(alpha) + b*sin(alpha); the defect is tiny after a step so
    one or two iterations suffice.
    """
    n = body.n
    alpha = 2.0 * np.pi * np.arange(n) / n
    ca, sa = np.cos(alpha), np.sin(alpha)
    theta = _theta_values(body)
    a = b = 0.0
    for _ in range(20):
        w = np.exp(1j * (theta + a * ca + b * sa))
        m = np.mean(w)
        if abs(m) <= tol:
            break
        da = np.mean(1j * w * ca)
        db = np.mean(1j * w * sa)
        jac = np.array([[da.real, db.real], [da.imag, db.imag]])
        step = np.linalg.solve(jac, [m.real, m.imag])
        a -= step[0]
        b -= step[1]
    else:
        raise GeometryError("closure projection did not converge")
    theta_hat = body.theta_hat.copy()
    # a*cos + b*sin contributes (a -+ i b)/2 at k = +-1
    theta_hat[1] += (a - 1j * b) / 2.0
    theta_hat[-1] += (a + 1j * b) / 2.0
    out = body.copy()
    out.theta_hat = spectral.enforce_real(theta_hat)
    return out


def reconstruct(body: BodyState, is_body: bool = True) -> CurveSamples:
    """Sample a body back to Cartesian collocation points.

    The position is the spectral antiderivative of (L/2pi)(cos theta,
    sin theta) with the mean tangent projected out before integration and
    the constant mode fixed so the sample mean equals ``x_mean``.
    """
    if not body.alive:
        raise GeometryError("cannot reconstruct a vanished body")
    if not np.all(np.isfinite(body.theta_hat)) or not np.isfinite(body.L):
        raise GeometryError("non-finite body state")
    n = body.n
    if n < 32 or n % 2:
        raise GeometryError("N_in must be even and >= 32")

    alpha = 2.0 * np.pi * np.arange(n) / n
    theta = _theta_values(body)
    tx, ty = np.cos(theta), np.sin(theta)
    defect = np.hypot(np.mean(tx), np.mean(ty))
    if defect > 1e-3:
        raise GeometryError(f"closure defect {defect:.3e} signals corrupted state")
    if defect > CLOSURE_WARN:
        # unprojected intermediate states carry an O(dt) defect; report once
        warnings.warn(
            f"closure defect {defect:.3e} above warning threshold",
            stacklevel=2,
        )

    scale = body.L / (2.0 * np.pi)
    x = scale * spectral.antiderivative(tx - np.mean(tx))
    y = scale * spectral.antiderivative(ty - np.mean(ty))
    points = np.column_stack([x, y]) + np.asarray(body.x_mean, dtype=float)

    tangent = np.column_stack([tx, ty])
    if is_body:
        normal = np.column_stack([-ty, tx])  # rotate +pi/2: into the body
    else:
        normal = np.column_stack([ty, -tx])  # rotate -pi/2: out of the channel
    theta_alpha = 1.0 + spectral.diff(theta - alpha)
    kappa = (2.0 * np.pi / body.L) * theta_alpha
    ds = body.L / n
    return CurveSamples(
        points=points,
        tangent=tangent,
        normal=normal,
        kappa=kappa,
        jacobian=ds,
        h=ds,
        L=body.L,
        is_body=is_body,
        alpha=alpha,
    )


def enclosed_area(samples: CurveSamples) -> float:
    """Signed area via the spectral shoelace 1/2 * integral(x dy - y dx)."""
    x, y = samples.points[:, 0], samples.points[:, 1]
    # d/ds = (2pi/L) d/dalpha; trapezoid over alpha with the jacobian folded in
    dx = spectral.diff(x)
    dy = spectral.diff(y)
    area = 0.5 * np.mean(x * dy - y * dx) * 2.0 * np.pi
    if area < 0:
        raise GeometryError("negative area: curve orientation is not CCW")
    return float(area)


def _polygon_is_simple(points: np.ndarray) -> bool:
    """Brute-force segment intersection check on the sampled polygon."""
    n = len(points)
    p = points
    q = np.roll(points, -1, axis=0)
    d = q - p
    for i in range(n):
        # skip the segment itself and its two neighbours
        js = np.arange(i + 2, n if i > 0 else n - 1)
        if len(js) == 0:
            continue
        r = p[i]
        s = d[i]
        denom = s[0] * d[js, 1] - s[1] * d[js, 0]
        rel = p[js] - r
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rel[:, 0] * d[js, 1] - rel[:, 1] * d[js, 0]) / denom
            u = (rel[:, 0] * s[1] - rel[:, 1] * s[0]) / (-denom)
        hit = (denom != 0) & (t > 0) & (t < 1) & (u > 0) & (u < 1)
        if np.any(hit):
            return False
    return True


def encode_curve(points: np.ndarray, n: int | None = None) -> BodyState:
    """Encode Cartesian samples of a smooth CCW closed curve.

    Resamples to equal arclength via Fourier interpolation, iterating the
    arclength map to a fixed point, then reads off the tangent angle.
    """
    points = np.asarray(points, dtype=float)
    if n is None:
        n = len(points)
    m = len(points)
    if m % 2:
        raise GeometryError("need an even number of input points")
    twice_area = np.sum(
        points[:, 0] * (np.roll(points[:, 1], -1) - np.roll(points[:, 1], 1))
    )
    if twice_area <= 0:
        raise GeometryError("input curve must be counterclockwise")
    if not _polygon_is_simple(points):
        raise GeometryError("input curve is not simple")

    cx = np.fft.fft(points[:, 0]) / m
    cy = np.fft.fft(points[:, 1]) / m
    dcx = spectral.diff_spectrum(cx)
    dcy = spectral.diff_spectrum(cy)

    def speed(beta):
        return np.hypot(spectral.eval_series(dcx, beta), spectral.eval_series(dcy, beta))

    # arclength s(beta) on a fine grid, then Newton for s(beta_j) = j*L/n
    fine = 8 * max(m, n)
    beta_fine = 2.0 * np.pi * np.arange(fine) / fine
    sp_fine = speed(beta_fine)
    mean_speed = float(np.mean(sp_fine))
    L = 2.0 * np.pi * mean_speed
    s_periodic = spectral.to_spectrum(sp_fine - mean_speed)
    s_anti = np.zeros_like(s_periodic)
    k = spectral.wavenumbers(fine)
    nz = k != 0
    s_anti[nz] = s_periodic[nz] / (1j * k[nz])

    def arclength(beta):
        return mean_speed * beta + spectral.eval_series(s_anti, beta)

    s0 = arclength(0.0)
    targets = np.arange(n) * L / n
    beta = 2.0 * np.pi * np.arange(n) / n  # initial guess
    converged = False
    for _ in range(RESAMPLE_MAX_ITERS):
        res = (arclength(beta) - s0) - targets
        step = res / speed(beta)
        beta = beta - step
        if np.max(np.abs(step)) < RESAMPLE_TOL:
            converged = True
            break
    if not converged:
        raise GeometryError("equal-arclength resampling did not converge")

    xs = spectral.eval_series(cx, beta)
    ys = spectral.eval_series(cy, beta)
    dxs = spectral.eval_series(dcx, beta)
    dys = spectral.eval_series(dcy, beta)
    theta = np.unwrap(np.arctan2(dys, dxs))
    alpha = 2.0 * np.pi * np.arange(n) / n
    p = theta - alpha
    p -= 2.0 * np.pi * round(float(np.mean(p)) / (2.0 * np.pi))
    body = BodyState(
        theta_hat=spectral.enforce_real(spectral.to_spectrum(p)),
        L=float(L),
        x_mean=np.array([np.mean(xs), np.mean(ys)]),
    )
    return project_closure(body)


def circle(center, radius: float, n: int) -> BodyState:
    """Exact tangent-angle encoding of a circle."""
    theta_hat = np.zeros(n, dtype=complex)
    # theta = alpha + pi/2: constant periodic part
    theta_hat[0] = np.pi / 2.0
    return BodyState(
        theta_hat=theta_hat,
        L=2.0 * np.pi * radius,
        x_mean=np.asarray(center, dtype=float),
    )


def ellipse(center, a: float, b: float, n: int, n_init: int | None = None) -> BodyState:
    """Equal-arclength encoding of an axis-aligned ellipse."""
    m = n_init or max(4 * n, 256)
    t = 2.0 * np.pi * np.arange(m) / m
    pts = np.column_stack([a * np.cos(t), b * np.sin(t)]) + np.asarray(center, float)
    return encode_curve(pts, n=n)


def wall_curve(
    n_out: int,
    fillet_radius: float = 0.2,
    smoothing: float = 0.04,
    half_length: float = 3.0,
    half_height: float = 1.0,
) -> tuple[BodyState, CurveSamples]:
    """C-infinity rounded rectangle for the channel wall.

    Built from the exact tangent-angle profile of a rectangle with circular
    fillets (continuous, arclength-parameterized), smoothed by a narrow
    Gaussian filter in alpha so all derivatives decay spectrally.
    """
    r = fillet_radius
    wx = 2.0 * (half_length - r)  # straight length, top/bottom
    wy = 2.0 * (half_height - r)  # straight length, left/right
    arc = 0.5 * np.pi * r
    P = 2.0 * wx + 2.0 * wy + 4.0 * arc

    # arclength origin at (half_length, 0) heading up (theta = pi/2), CCW
    seg_ends = np.cumsum([wy / 2, arc, wx, arc, wy, arc, wx, arc, wy / 2])
    s = P * np.arange(n_out) / n_out

    theta = np.full(n_out, np.pi / 2.0)
    prev = 0.0
    base = np.pi / 2.0
    for i, end in enumerate(seg_ends):
        mask = (s >= prev) & (s < end)
        if i % 2 == 0:  # straight segment
            theta[mask] = base
        else:  # corner arc: theta advances by pi/2 over length `arc`
            theta[mask] = base + (s[mask] - prev) / r
        if i % 2 == 1:
            base += np.pi / 2.0
        prev = end

    alpha = 2.0 * np.pi * s / P
    p = theta - alpha
    if smoothing > 0:
        p = spectral.gaussian_filter(p, smoothing)
    wall = BodyState(
        theta_hat=spectral.enforce_real(spectral.to_spectrum(p)),
        L=float(P),
        x_mean=np.zeros(2),
    )
    wall = project_closure(wall)
    # tangent smoothing inflates the extents slightly; normalize so the
    # half-height is exactly `half_height` (Poiseuille data vanishes there)
    samples = reconstruct(wall, is_body=False)
    wall.L *= half_height / float(np.max(np.abs(samples.points[:, 1])))
    return wall, reconstruct(wall, is_body=False)


def write_snapshot_csv(path, bodies_samples, taus=None, body_ids=None) -> None:
    """Curve snapshot CSV: body_id,alpha,x,y,kappa,tau per collocation point."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["body_id", "alpha", "x", "y", "kappa", "tau"])
        for i, smp in enumerate(bodies_samples):
            bid = body_ids[i] if body_ids is not None else i
            tau = taus[i] if taus is not None else np.zeros(smp.n)
            for j in range(smp.n):
                w.writerow(
                    [
                        bid,
                        repr(float(smp.alpha[j])),
                        repr(float(smp.points[j, 0])),
                        repr(float(smp.points[j, 1])),
                        repr(float(smp.kappa[j])),
                        repr(float(tau[j])),
                    ]
                )
