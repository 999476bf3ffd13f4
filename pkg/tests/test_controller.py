import math

import numpy as np
import pytest

from gaitevo.controller import (
    DimensionMismatch,
    INITIAL_STATE,
    init_network,
    integrate_outputs,
)
from gaitevo.lsystem import ACTIVE_HINGE, CORE, MOUNT_FRONT, MOUNT_LEFT
from gaitevo.morphology import core_only_body, decode


def two_joint_body():
    return decode([CORE, MOUNT_FRONT, ACTIVE_HINGE, MOUNT_LEFT, ACTIVE_HINGE])


def test_init_network_empty():
    net = init_network(core_only_body(), [])
    assert net.n == 0
    assert net.step(1 / 240).shape == (0,)


def test_init_network_sizes():
    net = init_network(two_joint_body(), np.linspace(-1, 1, 6))
    assert net.n == 2
    assert np.allclose(net.x, INITIAL_STATE)
    assert np.allclose(net.y, INITIAL_STATE)


def test_init_network_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        init_network(two_joint_body(), np.zeros(5))


def test_step_requires_positive_dt():
    net = init_network(two_joint_body(), np.zeros(6))
    with pytest.raises(ValueError):
        net.step(0.0)


def test_zero_weights_keep_state_and_output_zero():
    net = init_network(two_joint_body(), np.zeros(6))
    for _ in range(100):
        out = net.step(1 / 240)
        assert np.all(out == 0.0)
    assert np.allclose(net.x, INITIAL_STATE)
    assert np.allclose(net.y, INITIAL_STATE)


def test_antisymmetric_radius_drift_per_step():
    # w_xy = -w, w_yx = +w: the Euler step inflates x^2+y^2 by exactly (w dt)^2
    w, dt = 0.8, 1 / 240
    body = decode([CORE, MOUNT_FRONT, ACTIVE_HINGE])
    net = init_network(body, [-w, w, 0.5])
    for _ in range(200):
        r2 = float(net.x[0] ** 2 + net.y[0] ** 2)
        net.step(dt)
        r2_new = float(net.x[0] ** 2 + net.y[0] ** 2)
        assert r2_new == pytest.approx(r2 * (1 + (w * dt) ** 2), rel=1e-9)


def test_antisymmetric_matches_rotation_oracle():
    # moderate w keeps the Euler amplitude drift inside 1% over 30 s
    w, dt, seconds = 0.25, 1 / 240, 30.0
    body = decode([CORE, MOUNT_FRONT, ACTIVE_HINGE])
    net = init_network(body, [-w, w, 0.0])
    steps = int(round(seconds / dt))
    for _ in range(steps):
        net.step(dt)
    t = steps * dt
    # e^{At} for A = [[0, w], [-w, 0]] rotates the state by -w t
    c, s = math.cos(w * t), math.sin(w * t)
    x0 = y0 = INITIAL_STATE
    expected = np.array([c * x0 + s * y0, -s * x0 + c * y0])
    actual = np.array([net.x[0], net.y[0]])
    rel_err = np.linalg.norm(actual - expected) / np.linalg.norm(expected)
    assert rel_err < 0.01


def test_outputs_bounded_for_any_weights():
    rng = np.random.default_rng(2)
    body = two_joint_body()
    for _ in range(20):
        net = init_network(body, rng.uniform(-1, 1, 6))
        for _ in range(500):
            out = net.step(1 / 240)
            assert np.all(np.abs(out) < 1.0)
        assert np.all(np.abs(net.x) <= 10.0)
        assert np.all(np.abs(net.y) <= 10.0)


def test_trajectory_bitwise_deterministic():
    w = np.array([0.3, -0.7, 0.9, 0.1, 0.5, -0.2])
    body = two_joint_body()
    a = init_network(body, w)
    b = init_network(body, w)
    for _ in range(1000):
        out_a = a.step(1 / 240)
        out_b = b.step(1 / 240)
        assert np.array_equal(out_a, out_b)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_integrate_outputs_matches_stepping_bitwise():
    rng = np.random.default_rng(3)
    body = two_joint_body()
    weights = rng.uniform(-1, 1, (4, 6))
    dt, steps = 1 / 240, 400
    batch = integrate_outputs(weights, steps, dt)
    for row in range(4):
        net = init_network(body, weights[row])
        assert np.array_equal(batch[row, 0], net.outputs())
        for t in range(1, steps + 1):
            out = net.step(dt)
            assert np.array_equal(batch[row, t], out)
