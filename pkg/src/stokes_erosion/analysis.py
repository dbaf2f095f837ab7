"""Shape diagnostics and scaling-law fits for eroding bodies."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from . import spectral
from .geometry import BodyState, reconstruct

FIT_DEGREES = (5, 7, 9)
FIT_WINDOWS = (0.02, 0.04, 0.08)


def wedge_angle():
    """Root of sin(2t) - 2t cos(2t) on (pi/2, pi) and the opening angle.

    The uniform-shear-stress wedge condition; bisection bracket followed by a
    Newton polish. Returns (theta0, beta) in radians, beta = 2(pi - theta0).
    """
    f = lambda t: np.sin(2 * t) - 2 * t * np.cos(2 * t)
    fp = lambda t: 4 * t * np.sin(2 * t)
    lo, hi = np.pi / 2 + 1e-9, np.pi - 1e-9
    assert f(lo) * f(hi) < 0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    t0 = 0.5 * (lo + hi)
    for _ in range(8):
        t0 -= f(t0) / fp(t0)
    return t0, 2.0 * (np.pi - t0)


def _theta_full(body: BodyState) -> np.ndarray:
    alpha = 2.0 * np.pi * np.arange(body.n) / body.n
    return alpha + spectral.from_spectrum(body.theta_hat)


def _stagnation_alphas(body: BodyState, tau=None):
    """Parameter values of the front/rear stagnation points.

    Zero crossings of tau nearest alpha = 0 and pi; without tau, the extremal-x
    collocation points (tie-break is moot on closed smooth curves).
    """
    n = body.n
    alpha = 2.0 * np.pi * np.arange(n) / n
    if tau is None:
        x = reconstruct(body).points[:, 0]
        return alpha[np.argmax(x)], alpha[np.argmin(x)]
    s = np.sign(tau)
    flips = np.flatnonzero(s != np.roll(s, -1))
    if len(flips) < 2:
        x = reconstruct(body).points[:, 0]
        return alpha[np.argmax(x)], alpha[np.argmin(x)]
    # linear interpolation of the crossing within each flip interval
    cross = []
    for i in flips:
        j = (i + 1) % n
        t0, t1 = tau[i], tau[j]
        frac = t0 / (t0 - t1) if t0 != t1 else 0.5
        cross.append((alpha[i] + frac * 2.0 * np.pi / n) % (2.0 * np.pi))
    cross = np.asarray(cross)
    d0 = np.minimum(cross, 2.0 * np.pi - cross)
    a_front = cross[np.argmin(d0)]
    a_rear = cross[np.argmin(np.abs(cross - np.pi))]
    return a_front, a_rear


def _corner_jump(alpha, theta, a_star, arc_lo, arc_hi, degree, w):
    """Tangent-angle jump at a_star from one-sided polynomial extrapolation.

    The curve side on (arc_lo, a_star) approaches from below, the side on
    (a_star, arc_hi) from above; each side additionally excludes a window of
    half-width 2*pi*w around its far stagnation point.
    """
    pad = 2.0 * np.pi * w
    rel = (alpha - arc_lo) % (2.0 * np.pi)
    span_lo = (a_star - arc_lo) % (2.0 * np.pi) or 2.0 * np.pi
    span_hi = (arc_hi - a_star) % (2.0 * np.pi) or 2.0 * np.pi
    # theta = alpha + periodic part; rebuild it on the rel axis so the branch
    # is smooth across the parameter seam
    order = np.argsort(rel)
    rel_s = rel[order]
    th_u = arc_lo + rel_s + (theta - alpha)[order]

    below = (rel_s > pad) & (rel_s < span_lo - pad)
    above = (rel_s > span_lo + pad) & (rel_s < span_lo + span_hi - pad)
    if below.sum() <= degree or above.sum() <= degree:
        raise ValueError("too few points for the polynomial fit")
    pb = np.polynomial.Polynomial.fit(rel_s[below], th_u[below], degree)
    pa = np.polynomial.Polynomial.fit(rel_s[above], th_u[above], degree)
    return float(pa(span_lo) - pb(span_lo))


def measure_opening_angle(body: BodyState, tau=None):
    """Interior opening angles (front, rear) in radians with an uncertainty.

    Fits theta(alpha) on each side of the stagnation points with polynomials,
    extrapolates to the corner, and reads the angle off the tangent jump:
    beta = pi - jump. The uncertainty is the spread over fit degree and
    exclusion-window size.
    """
    theta = _theta_full(body)
    alpha = 2.0 * np.pi * np.arange(body.n) / body.n
    a_front, a_rear = _stagnation_alphas(body, tau)

    def both(degree, w):
        jf = _corner_jump(alpha, theta, a_front, a_rear - 2.0 * np.pi, a_rear, degree, w)
        jr = _corner_jump(alpha, theta, a_rear, a_front, a_front + 2.0 * np.pi, degree, w)
        return np.pi - jf, np.pi - jr

    samples = np.array(
        [both(d, w) for d in FIT_DEGREES for w in FIT_WINDOWS]
    )
    beta_front, beta_rear = both(7, 0.04)
    unc = float(np.max(np.ptp(samples, axis=0)))
    return beta_front, beta_rear, unc


def aspect_ratio(body: BodyState) -> float:
    """Width-to-height ratio on 16x Fourier-upsampled samples (axis-aligned)."""
    smp = reconstruct(body)
    x = spectral.upsample(smp.points[:, 0], 16)
    y = spectral.upsample(smp.points[:, 1], 16)
    return float(np.ptp(x) / np.ptp(y))


def fit_area_law(times, areas, t_f=None):
    """Fit (A/A0)(1 - c1 log(A/A0)) = (t_f - t)/t_f.

    c1 enters linearly so the fit is a projection; if t_f is not given it is
    optimized as well. Returns (t_f, c1, relative residual of the implicit
    relation).
    """
    t = np.asarray(times, dtype=float)
    A = np.asarray(areas, dtype=float)
    if np.any(np.diff(A) > 1e-12 * A[0]):
        raise ValueError("areas must be non-increasing for the area-law fit")
    u = A / A[0]
    ul = u * np.log(u, out=np.zeros_like(u), where=u > 0)

    def solve_c1(tf):
        rhs = (tf - t) / tf
        denom = float(ul @ ul)
        c1 = float(ul @ (u - rhs)) / denom if denom > 0 else 0.0
        r = (u - rhs) - c1 * ul
        return c1, float(np.linalg.norm(r) / np.linalg.norm(rhs))

    if t_f is None:
        res = minimize_scalar(
            lambda tf: solve_c1(tf)[1],
            bounds=(t[-1] * (1 + 1e-9), 10.0 * t[-1]),
            method="bounded",
        )
        t_f = float(res.x)
    c1, rel = solve_c1(t_f)
    return t_f, c1, rel


def fit_drag_law(times, drags, areas, U=1.0, window=0.5):
    """Fit F_D/(4 pi U) = 1/log(ell/a) with a = sqrt(A/pi).

    The fit and the reported relative residual use the late-time `window`
    fraction of the series. Returns (ell, residual).
    """
    t = np.asarray(times, dtype=float)
    F = np.asarray(drags, dtype=float)
    a = np.sqrt(np.asarray(areas, dtype=float) / np.pi)
    Uv = np.broadcast_to(np.asarray(U, dtype=float), t.shape)
    i0 = np.searchsorted(t, t[0] + (1.0 - window) * (t[-1] - t[0]))
    if len(t) - i0 < 3:
        raise ValueError("too few late-time points for the drag-law fit")
    sel = slice(i0, None)

    def resid(log_ell):
        model = 4.0 * np.pi * Uv[sel] / (log_ell - np.log(a[sel]))
        return float(np.linalg.norm(model - F[sel]) / np.linalg.norm(F[sel]))

    res = minimize_scalar(
        resid,
        bounds=(np.log(np.max(a) * 1.0001), np.log(1e3)),
        method="bounded",
    )
    return float(np.exp(res.x)), resid(res.x)


def write_metrics_csv(path, rows) -> None:
    """Metrics CSV: t,aspect_ratio,beta_front,beta_rear,beta_unc (degrees)."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "aspect_ratio", "beta_front", "beta_rear", "beta_unc"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])
