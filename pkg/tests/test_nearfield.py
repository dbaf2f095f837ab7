import numpy as np

from stokes_erosion import bie, nearfield


def test_upsample_rule_dyadic_bands():
    h = 0.01
    assert nearfield.upsample_rule(10 * h, h) == 1
    assert nearfield.upsample_rule(5 * h, h) == 1
    assert nearfield.upsample_rule(4.9 * h, h) == 2
    assert nearfield.upsample_rule(2.5 * h, h) == 2
    assert nearfield.upsample_rule(2.4 * h, h) == 4
    assert nearfield.upsample_rule(0.7 * h, h) == 8
    assert nearfield.upsample_rule(0.35 * h, h) == 16
    assert nearfield.upsample_rule(0.3 * h, h) == nearfield.TOO_CLOSE


def test_target_rates_classification(manufactured):
    d = manufactured.domain
    smp = d.body_samples[0]
    h = smp.h
    # probe along inward fluid normal at controlled distances
    j = 17
    base = smp.points[j]
    into_fluid = -smp.normal[j]
    for dist, want in [(6 * h, 1), (3 * h, 2), (1.5 * h, 4), (0.2 * h, nearfield.TOO_CLOSE)]:
        rate = nearfield.target_rates(d, np.array([base + dist * into_fluid]))[0]
        assert rate == want, (dist / h, rate, want)


def test_near_boundary_velocity_accuracy(manufactured):
    m = manufactured
    smp = m.domain.body_samples[0]
    h = smp.h
    # half a grid spacing off the body: plain quadrature would be useless here
    targets = smp.points[::8] - 0.5 * h * smp.normal[::8]
    vel, ok = bie.evaluate_velocity(m.domain, m.sol, targets)
    assert ok.all()
    assert np.max(np.abs(vel - m.velocity(targets))) < 1e-6


def test_too_close_targets_flagged(manufactured):
    m = manufactured
    smp = m.domain.body_samples[0]
    targets = smp.points[::16] - 0.01 * smp.h * smp.normal[::16]
    vel, ok = bie.evaluate_velocity(m.domain, m.sol, targets)
    assert not ok.any()
    assert np.all(vel[~ok] == 0.0)
