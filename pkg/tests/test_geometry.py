import csv

import numpy as np
import pytest

from stokes_erosion import geometry, spectral
from stokes_erosion.geometry import GeometryError


def test_circle_reconstruction_matches_parametric_oracle():
    n = 128
    r, c = 0.35, np.array([0.4, -0.2])
    smp = geometry.reconstruct(geometry.circle(c, r, n))
    a = 2.0 * np.pi * np.arange(n) / n
    # equal-arclength circle samples starting at the rightmost point
    oracle = c + r * np.column_stack([np.cos(a), np.sin(a)])
    assert np.allclose(smp.points, oracle, atol=1e-12)
    assert np.allclose(smp.kappa, 1.0 / r, atol=1e-12)
    assert np.isclose(smp.L, 2 * np.pi * r)
    # tangent CCW, normal = tangent rotated +pi/2 (into the body)
    assert np.allclose(smp.tangent, np.column_stack([-np.sin(a), np.cos(a)]), atol=1e-12)
    assert np.allclose(smp.normal, -np.column_stack([np.cos(a), np.sin(a)]), atol=1e-12)


def test_ellipse_matches_parametric_oracle():
    a_ax, b_ax = 0.5, 0.2
    body = geometry.ellipse((0.0, 0.0), a_ax, b_ax, 256)
    pts = geometry.reconstruct(body).points
    # implicit-equation residual
    res = (pts[:, 0] / a_ax) ** 2 + (pts[:, 1] / b_ax) ** 2 - 1.0
    assert np.max(np.abs(res)) < 1e-8
    # equal arclength spacing: |dx/dalpha| constant
    speed = np.hypot(spectral.diff(pts[:, 0]), spectral.diff(pts[:, 1]))
    assert np.ptp(speed) / np.mean(speed) < 1e-6


def test_enclosed_area_against_upsampled_polygon_oracle():
    body = geometry.ellipse((0.1, 0.0), 0.4, 0.25, 128)
    smp = geometry.reconstruct(body)
    x = spectral.upsample(smp.points[:, 0], 64)
    y = spectral.upsample(smp.points[:, 1], 64)
    shoelace = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    # the polygon oracle is second-order accurate in the upsampled spacing
    assert np.isclose(geometry.enclosed_area(smp), shoelace, rtol=1e-6)
    assert np.isclose(geometry.enclosed_area(smp), np.pi * 0.4 * 0.25, rtol=1e-8)


def test_clockwise_curve_rejected():
    t = 2.0 * np.pi * np.arange(128) / 128
    pts = np.column_stack([0.3 * np.cos(-t), 0.3 * np.sin(-t)])
    with pytest.raises(GeometryError):
        geometry.encode_curve(pts)


def test_self_intersecting_curve_rejected():
    t = 2.0 * np.pi * np.arange(256) / 256
    r = 0.3 * (1.0 + 1.5 * np.cos(2 * t))  # figure-eight-like limacon
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    with pytest.raises(GeometryError):
        geometry.encode_curve(pts)


def test_closure_projection_restores_closed_curve():
    body = geometry.ellipse((0.0, 0.0), 0.3, 0.2, 64)
    body.theta_hat[1] += 1e-4  # open the curve slightly
    body.theta_hat = spectral.enforce_real(body.theta_hat)
    assert geometry.closure_defect(body) > 1e-5
    body = geometry.project_closure(body)
    assert geometry.closure_defect(body) < geometry.CLOSURE_TOL


def test_encode_curve_round_trip():
    body = geometry.ellipse((0.2, 0.1), 0.35, 0.2, 128)
    pts = geometry.reconstruct(body).points
    again = geometry.encode_curve(pts)
    pts2 = geometry.reconstruct(again).points
    assert np.max(np.abs(pts - pts2)) < 1e-9


def test_wall_curve_geometry():
    wall, smp = geometry.wall_curve(256)
    assert np.isclose(np.max(np.abs(smp.points[:, 1])), 1.0, atol=1e-12)
    assert np.max(smp.points[:, 0]) <= 3.0 + 1e-6
    assert not smp.is_body
    # wall normal points out of the channel: at the top, normal_y > 0
    top = np.argmax(smp.points[:, 1])
    assert smp.normal[top, 1] > 0.9
    assert geometry.closure_defect(wall) < geometry.CLOSURE_TOL
    # smooth: spectral coefficients of the tangent angle decay well below the
    # equal-arclength resampling tolerance
    tail = np.abs(wall.theta_hat[110:-110])
    assert np.max(tail) < 1e-6


def test_body_too_coarse_rejected():
    with pytest.raises(GeometryError):
        geometry.reconstruct(geometry.circle((0, 0), 0.1, 16))


def test_snapshot_csv_format(tmp_path):
    body = geometry.circle((0.0, 0.0), 0.2, 64)
    smp = geometry.reconstruct(body)
    tau = np.linspace(-1, 1, 64)
    path = tmp_path / "snap.csv"
    geometry.write_snapshot_csv(path, [smp], taus=[tau], body_ids=[3])
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 64
    assert set(rows[0]) == {"body_id", "alpha", "x", "y", "kappa", "tau"}
    assert rows[0]["body_id"] == "3"
    assert float(rows[10]["tau"]) == tau[10]  # repr round-trip is exact
