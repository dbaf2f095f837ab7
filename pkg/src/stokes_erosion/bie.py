"""Completed second-kind boundary integral equation for the Stokes system.

The velocity is a double-layer potential over all boundaries, completed with
one Stokeslet and one rotlet per body, plus the wall-only rank-one term that
removes the null space of the Dirichlet problem. The discrete operator is a
dense Nystrom matrix applied via BLAS; the matvec is abstracted so a fast
backend can replace it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, nearfield
from .domain import FlowDomain, boundary_velocity

__all__ = [
    "DensitySolution",
    "SolverError",
    "assemble",
    "pack",
    "unpack",
    "gmres",
    "solve",
    "evaluate_velocity",
    "rescale_fixed_pressure_drop",
]


class SolverError(RuntimeError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


@dataclass
class DensitySolution:
    """BIE unknowns: density plus per-body Stokeslet/rotlet strengths."""

    eta: np.ndarray  # (N, 2)
    lam: np.ndarray  # (M, 2)
    xi: np.ndarray  # (M,)

    def scaled(self, factor: float) -> "DensitySolution":
        return DensitySolution(self.eta * factor, self.lam * factor, self.xi * factor)


def pack(sol: DensitySolution) -> np.ndarray:
    tail = np.column_stack([sol.lam, sol.xi]).ravel() if len(sol.xi) else np.zeros(0)
    return np.concatenate([sol.eta.ravel(), tail])


def unpack(v: np.ndarray, n_points: int, n_bodies: int) -> DensitySolution:
    eta = v[: 2 * n_points].reshape(n_points, 2)
    tail = v[2 * n_points :].reshape(n_bodies, 3)
    return DensitySolution(eta=eta, lam=tail[:, :2].copy(), xi=tail[:, 2].copy())


def assemble(domain: FlowDomain, chunk: int = 512) -> np.ndarray:
    """Dense system matrix in the packed layout.

    Rows 0..2N-1: -eta/2 + DLP (diagonal replaced by the limiting value
    -kappa_fluid/(2 pi) ss x ss) + Stokeslets + rotlets + the wall null-space
    term. Last 3M rows: strength constraints tying (lambda, xi) to eta.
    """
    pts = domain.points
    nor = domain.normals
    tan = domain.tangents
    ds = domain.weights
    N = domain.n_points
    M = domain.n_bodies
    size = 2 * N + 3 * M
    A = np.zeros((size, size))

    wall = domain.wall_slice
    nwall = nor[wall]
    for i0 in range(0, N, chunk):
        i1 = min(i0 + chunk, N)
        t = pts[i0:i1]
        r = t[:, None, :] - pts[None, :, :]
        rho2 = np.einsum("tsa,tsa->ts", r, r)
        ii = np.arange(i0, i1)
        rho2[ii - i0, ii] = 1.0  # diagonal patched below
        rn = np.einsum("tsa,sa->ts", r, nor)
        coef = rn / (np.pi * rho2**2) * ds[None, :]
        # block[t, s, a, b] = coef * r_a r_b
        block = np.einsum("ts,tsa,tsb->tsab", coef, r, r)
        # diagonal limit
        tt = np.einsum("ta,tb->tab", tan[i0:i1], tan[i0:i1])
        block[ii - i0, ii] = (
            -domain.kappa_fluid[i0:i1, None, None]
            / (2.0 * np.pi)
            * tt
            * ds[i0:i1, None, None]
        )
        # wall null-space term: n(x) x n(y) on wall rows/cols
        wi = ii[(ii >= wall.start) & (ii < wall.stop)]
        if len(wi):
            nn = np.einsum("ta,sb->tsab", nor[wi], nwall)
            block[wi - i0, wall] += nn * ds[wall][None, :, None, None]
        A[2 * i0 : 2 * i1, : 2 * N] = block.transpose(0, 2, 1, 3).reshape(
            2 * (i1 - i0), 2 * N
        )
        # Stokeslet / rotlet columns
        if M:
            rc = t[:, None, :] - domain.anchors[None, :, :]
            rho2c = np.einsum("tsa,tsa->ts", rc, rc)
            rrc = np.einsum("tsa,tsb->tsab", rc, rc)
            Sblk = (
                -0.5 * np.log(rho2c)[:, :, None, None] * np.eye(2)[None, None]
                + rrc / rho2c[:, :, None, None]
            ) / (4.0 * np.pi)
            rperp = np.stack([rc[:, :, 1], -rc[:, :, 0]], axis=-1)
            Rcol = rperp / rho2c[:, :, None]
            cols = np.concatenate([Sblk, Rcol[:, :, :, None]], axis=3)  # (t, M, 2, 3)
            A[2 * i0 : 2 * i1, 2 * N :] = cols.transpose(0, 2, 1, 3).reshape(
                2 * (i1 - i0), 3 * M
            )
    # -1/2 eta on the diagonal
    idx = np.arange(2 * N)
    A[idx, idx] -= 0.5
    # constraint rows
    for ell in range(M):
        sl = domain.body_slice(ell)
        row0 = 2 * N + 3 * ell
        w = ds[sl] / (2.0 * np.pi)
        A[row0, 2 * sl.start : 2 * sl.stop : 2] = -w
        A[row0 + 1, 2 * sl.start + 1 : 2 * sl.stop : 2] = -w
        yrel = pts[sl] - domain.anchors[ell]
        # y_perp . eta = yrel_y * eta_x - yrel_x * eta_y
        A[row0 + 2, 2 * sl.start : 2 * sl.stop : 2] = -w * yrel[:, 1]
        A[row0 + 2, 2 * sl.start + 1 : 2 * sl.stop : 2] = w * yrel[:, 0]
        A[row0, 2 * N + 3 * ell] = 1.0
        A[row0 + 1, 2 * N + 3 * ell + 1] = 1.0
        A[row0 + 2, 2 * N + 3 * ell + 2] = 1.0
    return A


def apply_operator(domain: FlowDomain, v: np.ndarray, A: np.ndarray | None = None):
    """Abstract matvec of the packed system; dense direct summation here."""
    if A is None:
        A = assemble(domain)
    out = A @ v
    if not np.all(np.isfinite(out)):
        raise SolverError("non-finite operator output: geometry degeneracy")
    return out


def gmres(matvec, b, tol=1e-8, max_iters=2000, x0=None):
    """Modified Gram-Schmidt GMRES, no restart, relative-residual stopping."""
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b), 0, [0.0]
    x = np.zeros_like(b) if x0 is None else np.asarray(x0, dtype=float)
    r = b - matvec(x) if x0 is not None else b.copy()
    beta = np.linalg.norm(r)
    residuals = [beta / bnorm]
    if residuals[0] <= tol:
        return x, 0, residuals
    max_iters = min(max_iters, len(b))
    cap = min(max_iters, 128)
    V = np.zeros((cap + 1, len(b)))
    V[0] = r / beta
    H = np.zeros((cap + 1, cap))
    cs = np.zeros(cap)
    sn = np.zeros(cap)
    g = np.zeros(cap + 1)
    g[0] = beta
    k = 0
    for j in range(max_iters):
        if j + 1 > cap:  # grow the Krylov workspace geometrically
            new = min(max_iters, 2 * cap)
            V = np.vstack([V, np.zeros((new - cap, len(b)))])
            Hn = np.zeros((new + 1, new))
            Hn[: cap + 1, :cap] = H
            H = Hn
            cs = np.concatenate([cs, np.zeros(new - cap)])
            sn = np.concatenate([sn, np.zeros(new - cap)])
            g = np.concatenate([g, np.zeros(new - cap)])
            cap = new
        w = matvec(V[j])
        for i in range(j + 1):
            H[i, j] = V[i] @ w
            w -= H[i, j] * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j] > 0:
            V[j + 1] = w / H[j + 1, j]
        # apply accumulated Givens rotations
        for i in range(j):
            hij = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = hij
        denom = np.hypot(H[j, j], H[j + 1, j])
        cs[j] = H[j, j] / denom
        sn[j] = H[j + 1, j] / denom
        H[j, j] = denom
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        k = j + 1
        residuals.append(abs(g[j + 1]) / bnorm)
        if residuals[-1] <= tol:
            break
    else:
        raise SolverError(
            f"GMRES did not converge in {max_iters} iterations", residuals
        )
    if residuals[-1] > tol:
        raise SolverError(f"GMRES did not converge in {k} iterations", residuals)
    y = np.linalg.solve(np.triu(H[:k, :k]), g[:k])
    return x + V[:k].T @ y, k, residuals


def solve(
    domain: FlowDomain,
    f: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iters: int = 2000,
    x0: DensitySolution | None = None,
    A: np.ndarray | None = None,
):
    """Solve the completed BIE for Dirichlet data f (default: Poiseuille).

    Returns (DensitySolution, info) with the GMRES iteration count and the
    residual history in info.
    """
    if f is None:
        f = boundary_velocity(domain)
    if A is None:
        A = assemble(domain)
    b = np.concatenate([np.asarray(f, dtype=float).ravel(), np.zeros(3 * domain.n_bodies)])
    v0 = pack(x0) if x0 is not None else None
    v, iters, residuals = gmres(
        lambda u: apply_operator(domain, u, A), b, tol=tol, max_iters=max_iters, x0=v0
    )
    sol = unpack(v, domain.n_points, domain.n_bodies)
    return sol, {"iterations": iters, "residuals": residuals}


def _singular_velocity(domain: FlowDomain, sol: DensitySolution):
    if domain.n_bodies == 0:
        return None

    def term(targets):
        return kernels.stokeslet_velocity(
            targets, domain.anchors, sol.lam
        ) + kernels.rotlet_velocity(targets, domain.anchors, sol.xi)

    return term


def evaluate_velocity(domain: FlowDomain, sol: DensitySolution, targets: np.ndarray):
    """Velocity at interior targets with near-singular upsampling.

    Targets closer than 5h/16 to the boundary get zero.
    """
    vel, ok = nearfield.evaluate_field(
        domain,
        sol.eta,
        targets,
        kernels.dlp_velocity,
        _singular_velocity(domain, sol),
    )
    return vel, ok


def rescale_fixed_pressure_drop(
    sol: DensitySolution, p_minus: float, p_plus: float, U: float
):
    """Rescale the solution so the averaged pressure drop equals one."""
    drop = p_minus - p_plus
    if abs(drop) < 1e-12:
        raise SolverError("degenerate configuration: vanishing pressure drop")
    return sol.scaled(1.0 / drop), U / drop
