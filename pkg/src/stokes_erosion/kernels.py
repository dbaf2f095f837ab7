"""Vectorized Stokes layer-potential kernels.

Targets are (T, 2), sources (S, 2) with unit normals and trapezoid weights
w = eta * ds folded in by the callers where noted. All formulas were derived
symbolically from the double-layer velocity representation; mu = 1.
"""

from __future__ import annotations

import numpy as np


def _geom(targets, sources):
    r = targets[:, None, :] - sources[None, :, :]  # (T, S, 2)
    rho2 = np.einsum("tsa,tsa->ts", r, r)
    return r, rho2


def dlp_velocity(targets, sources, normals, eta, ds):
    """(1/pi) * (r.n/rho^2) * (r (r.eta)) / rho^2, summed with weights ds."""
    r, rho2 = _geom(targets, sources)
    rn = np.einsum("tsa,sa->ts", r, normals)
    re = np.einsum("tsa,sa->ts", r, eta)
    coef = rn * re / (np.pi * rho2**2) * ds
    return np.einsum("ts,tsa->ta", coef, r)


def dlp_vorticity(targets, sources, normals, eta, ds):
    """Curl of the double-layer velocity (derived form)."""
    r, rho2 = _geom(targets, sources)
    nperp = np.column_stack([normals[:, 1], -normals[:, 0]])
    eperp = np.column_stack([eta[:, 1], -eta[:, 0]])
    rn = np.einsum("tsa,sa->ts", r, normals)
    re = np.einsum("tsa,sa->ts", r, eta)
    rnp = np.einsum("tsa,sa->ts", r, nperp)
    rep = np.einsum("tsa,sa->ts", r, eperp)
    return -np.sum((rnp * re + rn * rep) / (np.pi * rho2**2) * ds, axis=1)


def dlp_pressure(targets, sources, normals, eta, ds):
    """-(1/pi) * (1/rho^2) (I - 2 r rT / rho^2) n . eta, summed with ds."""
    r, rho2 = _geom(targets, sources)
    rn = np.einsum("tsa,sa->ts", r, normals)
    re = np.einsum("tsa,sa->ts", r, eta)
    ne = np.einsum("sa,sa->s", normals, eta)
    val = (ne[None, :] - 2.0 * rn * re / rho2) / rho2
    return -np.sum(val / np.pi * ds, axis=1)


def dlp_deformation(targets, sources, normals, eta, ds):
    """Deformation tensor (1/2)(grad u + grad u^T) of the double layer.

    Returns (T, 2, 2). Callers handle singularity subtraction.
    """
    r, rho2 = _geom(targets, sources)
    rn = np.einsum("tsa,sa->ts", r, normals)
    re = np.einsum("tsa,sa->ts", r, eta)
    I = np.eye(2)
    t1 = np.einsum("ts,ab->tsab", 2.0 * rn * re / rho2**2, I)
    nr = np.einsum("sa,tsb->tsab", normals, r)
    t2 = np.einsum("ts,tsab->tsab", re / rho2**2, nr + np.swapaxes(nr, 2, 3))
    er = np.einsum("sa,tsb->tsab", eta, r)
    t3 = np.einsum("ts,tsab->tsab", rn / rho2**2, er + np.swapaxes(er, 2, 3))
    rr = np.einsum("tsa,tsb->tsab", r, r)
    t4 = np.einsum("ts,tsab->tsab", 8.0 * rn * re / rho2**3, rr)
    total = (t1 + t2 + t3 - t4) / (2.0 * np.pi)
    return np.einsum("tsab,s->tab", total, ds)


def stokeslet_velocity(targets, anchors, lam):
    """(1/4pi)(-log rho I + r rT / rho^2) lambda, summed over anchors."""
    r, rho2 = _geom(targets, anchors)
    rl = np.einsum("tsa,sa->ts", r, lam)
    term = -0.5 * np.log(rho2)[:, :, None] * lam[None, :, :] + (
        rl / rho2
    )[:, :, None] * r
    return np.sum(term, axis=1) / (4.0 * np.pi)


def rotlet_velocity(targets, anchors, xi):
    """(r_perp / rho^2) xi with r_perp = (r2, -r1), summed over anchors."""
    r, rho2 = _geom(targets, anchors)
    rperp = np.stack([r[:, :, 1], -r[:, :, 0]], axis=-1)
    return np.einsum("tsa,s->ta", rperp / rho2[:, :, None], xi)


def stokeslet_pressure(targets, anchors, lam):
    r, rho2 = _geom(targets, anchors)
    rl = np.einsum("tsa,sa->ts", r, lam)
    return np.sum(rl / (2.0 * np.pi * rho2), axis=1)


def stokeslet_vorticity(targets, anchors, lam):
    # curl of the 2D Stokeslet: -(r . lam_perp) / (2 pi rho^2), lam_perp=(l2,-l1)
    r, rho2 = _geom(targets, anchors)
    lperp = np.column_stack([lam[:, 1], -lam[:, 0]])
    rlp = np.einsum("tsa,sa->ts", r, lperp)
    return -np.sum(rlp / (2.0 * np.pi * rho2), axis=1)


def stokeslet_deformation(targets, anchors, lam):
    """(r.lam)/(4 pi rho^2) (I - 2 r rT / rho^2), summed over anchors."""
    r, rho2 = _geom(targets, anchors)
    rl = np.einsum("tsa,sa->ts", r, lam)
    I = np.eye(2)
    rr = np.einsum("tsa,tsb->tsab", r, r)
    term = (rl / (4.0 * np.pi * rho2))[:, :, None, None] * (
        I[None, None] - 2.0 * rr / rho2[:, :, None, None]
    )
    return np.sum(term, axis=1)


def rotlet_deformation(targets, anchors, xi):
    """-(xi/rho^4)(r x rperp^T + rperp x r^T), summed over anchors."""
    r, rho2 = _geom(targets, anchors)
    rperp = np.stack([r[:, :, 1], -r[:, :, 0]], axis=-1)
    rrp = np.einsum("tsa,tsb->tsab", r, rperp)
    term = -(xi[None, :] / rho2**2)[:, :, None, None] * (
        rrp + np.swapaxes(rrp, 2, 3)
    )
    return np.sum(term, axis=1)
