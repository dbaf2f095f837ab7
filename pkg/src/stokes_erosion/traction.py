"""Surface shear stress from a solved density.

The deformation tensor on a body combines the boundary limit of the
double-layer tensor (jump term plus a principal value computed with
singularity subtraction and odd-even quadrature), and the smooth
Stokeslet/rotlet tensors. On no-slip boundaries the resulting shear stress
equals the boundary vorticity.
"""

from __future__ import annotations

import numpy as np

from . import kernels, spectral
from .bie import DensitySolution
from .domain import FlowDomain


def jump_term(domain: FlowDomain, sol: DensitySolution, body_index: int) -> np.ndarray:
    """Boundary jump of the double-layer deformation tensor, (n, 2, 2).

    J = 1/2 (d eta/ds . ss) [[sx^2-sy^2, 2 sx sy], [2 sx sy, sy^2-sx^2]]
    with the arclength derivative by Fourier differentiation.
    """
    sl = domain.body_slice(body_index)
    smp = domain.body_samples[body_index]
    eta = sol.eta[sl]
    scale = 2.0 * np.pi / smp.L
    deta = np.column_stack(
        [spectral.diff(eta[:, 0]) * scale, spectral.diff(eta[:, 1]) * scale]
    )
    proj = np.einsum("ia,ia->i", deta, smp.tangent)
    sx, sy = smp.tangent[:, 0], smp.tangent[:, 1]
    J = np.empty((smp.n, 2, 2))
    J[:, 0, 0] = sx**2 - sy**2
    J[:, 1, 1] = sy**2 - sx**2
    J[:, 0, 1] = J[:, 1, 0] = 2.0 * sx * sy
    return 0.5 * proj[:, None, None] * J


def deformation_dlp_boundary(
    domain: FlowDomain, sol: DensitySolution, body_index: int
) -> np.ndarray:
    """Double-layer deformation tensor at the body's collocation points.

    Other boundaries contribute by plain trapezoid (smooth kernels); the
    self-body principal value uses constant-density subtraction, which
    reduces the singularity to O(1/rho), integrated with the odd-even
    trapezoid rule: odd targets sum even sources (and vice versa) with
    doubled weights.
    """
    sl = domain.body_slice(body_index)
    smp = domain.body_samples[body_index]
    targets = smp.points
    n = smp.n

    mask = np.ones(domain.n_points, dtype=bool)
    mask[sl] = False
    sigma = kernels.dlp_deformation(
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
        I = np.eye(2)
        t1 = np.einsum("ts,ab->tsab", 2.0 * rn * re / rho2**2, I)
        nr = np.einsum("sa,tsb->tsab", smp.normal[ssel], r)
        t2 = np.einsum("ts,tsab->tsab", re / rho2**2, nr + np.swapaxes(nr, 2, 3))
        er = np.einsum("tsa,tsb->tsab", diff, r)
        t3 = np.einsum("ts,tsab->tsab", rn / rho2**2, er + np.swapaxes(er, 2, 3))
        rr = np.einsum("tsa,tsb->tsab", r, r)
        t4 = np.einsum("ts,tsab->tsab", 8.0 * rn * re / rho2**3, rr)
        sigma[tsel] += np.sum(t1 + t2 + t3 - t4, axis=1) / (2.0 * np.pi) * ds2
    return sigma


def boundary_deformation(
    domain: FlowDomain, sol: DensitySolution, body_index: int
) -> np.ndarray:
    """Full deformation tensor limit on a body: jump + DLP + Stokeslet + rotlet."""
    smp = domain.body_samples[body_index]
    sigma = jump_term(domain, sol, body_index)
    sigma += deformation_dlp_boundary(domain, sol, body_index)
    if domain.n_bodies:
        sigma += kernels.stokeslet_deformation(smp.points, domain.anchors, sol.lam)
        sigma += kernels.rotlet_deformation(smp.points, domain.anchors, sol.xi)
    return sigma


def shear_stress(domain: FlowDomain, sol: DensitySolution) -> list[np.ndarray]:
    """Signed shear stress tau per body, tau = -2 (sigma n) . ss."""
    taus = []
    for ell in range(domain.n_bodies):
        smp = domain.body_samples[ell]
        sigma = boundary_deformation(domain, sol, ell)
        tau = -2.0 * np.einsum(
            "iab,ib,ia->i", sigma, smp.normal, smp.tangent
        )
        if not np.all(np.isfinite(tau)):
            raise FloatingPointError("non-finite shear stress: unresolved geometry")
        taus.append(tau)
    return taus
