import numpy as np

from stokes_erosion import postprocess, traction


def test_manufactured_shear_stress(manufactured):
    m = manufactured
    tau = traction.shear_stress(m.domain, m.sol)[0]
    exact = m.shear_stress(m.domain.body_samples[0])
    assert np.max(np.abs(tau - exact)) < 1e-8


def test_shear_stress_equals_boundary_vorticity(manufactured):
    m = manufactured
    tau = traction.shear_stress(m.domain, m.sol)[0]
    omega = postprocess.boundary_vorticity(m.domain, m.sol)[0]
    assert np.max(np.abs(np.abs(tau) - np.abs(omega))) < 1e-6


def test_shear_stress_mirror_symmetries(poiseuille_circle):
    d, sol, _ = poiseuille_circle
    tau = traction.shear_stress(d, sol)[0]
    n = len(tau)
    j = np.arange(n)
    # fore-aft mirror x -> -x: vorticity (hence tau) is even
    assert np.max(np.abs(tau - tau[(n // 2 - j) % n])) < 1e-8
    # up-down mirror y -> -y: tau is odd
    assert np.max(np.abs(tau + tau[-j % n])) < 1e-8
    # composition: diametrically opposite points carry opposite shear
    assert np.max(np.abs(tau + tau[(j + n // 2) % n])) < 1e-8


def test_stagnation_points_fore_and_aft(poiseuille_circle):
    d, sol, _ = poiseuille_circle
    tau = traction.shear_stress(d, sol)[0]
    n = len(tau)
    # alpha = 0 (rear, +x) and alpha = pi (front, -x) are stagnation points
    assert abs(tau[0]) < 1e-8
    assert abs(tau[n // 2]) < 1e-8
    # shear peaks near the top/bottom of the body
    assert np.max(np.abs(tau)) > 10 * np.mean(np.abs(tau[:3]) + 1e-30)
