import numpy as np
import pytest

from stokes_erosion import bie, domain as dom, geometry, kernels


class ManufacturedCase:
    """Exterior flow driven by a point singularity hidden inside the body.

    The stokeslet/rotlet field is an exact Stokes solution in the fluid, so
    solving the BIE with its boundary trace must reproduce velocity,
    vorticity, pressure, and stress everywhere in the fluid.
    """

    def __init__(self, n_in=128, n_out=256):
        self.src = np.array([[0.32, -0.08]])
        self.lam = np.array([[0.7, -0.4]])
        self.xi = np.array([0.5])
        wall, wall_s = geometry.wall_curve(n_out)
        self.body = geometry.circle((0.3, -0.1), 0.35, n_in)
        self.domain = dom.make_domain(wall_s, [self.body], U=0.0)
        self.sol, self.info = bie.solve(
            self.domain, f=self.velocity(self.domain.points), tol=1e-12
        )

    def velocity(self, t):
        return kernels.stokeslet_velocity(t, self.src, self.lam) + kernels.rotlet_velocity(
            t, self.src, self.xi
        )

    def pressure(self, t):
        return kernels.stokeslet_pressure(t, self.src, self.lam)

    def vorticity(self, t):
        # the rotlet field is irrotational away from its singularity
        return kernels.stokeslet_vorticity(t, self.src, self.lam)

    def deformation(self, t):
        return kernels.stokeslet_deformation(t, self.src, self.lam) + kernels.rotlet_deformation(
            t, self.src, self.xi
        )

    def shear_stress(self, samples):
        se = self.deformation(samples.points)
        return -2.0 * np.einsum("iab,ib,ia->i", se, samples.normal, samples.tangent)

    def fluid_targets(self, n, pad=0.55, seed=0):
        rng = np.random.default_rng(seed)
        pts = []
        while len(pts) < n:
            p = rng.uniform([-2.8, -0.8], [2.8, 0.8])
            if np.linalg.norm(p - [0.3, -0.1]) > pad:
                pts.append(p)
        return np.array(pts)


@pytest.fixture(scope="session")
def manufactured():
    return ManufacturedCase()


@pytest.fixture(scope="session")
def poiseuille_circle():
    """Unit-strength Poiseuille flow past one centered circle."""
    wall, wall_s = geometry.wall_curve(256)
    body = geometry.circle((0.0, 0.0), 0.2, 128)
    d = dom.make_domain(wall_s, [body], U=1.0)
    sol, info = bie.solve(d, tol=1e-10)
    return d, sol, info
