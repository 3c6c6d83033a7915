"""Tests for the primal descent solver."""

import math

import numpy as np
import pytest

from minball import (
    Ball,
    Instance,
    coverage_values,
    generate_instance,
    preprocess_instance,
    solve_primal,
    validate,
)


def ball(center, radius=0.0):
    return Ball(np.asarray(center, dtype=float), float(radius))


def tangency_optimum(b1, b2):
    """Analytic optimum for two balls: midpoint of the two far tangent points."""
    if b1.radius < b2.radius:
        b1, b2 = b2, b1
    gap = np.linalg.norm(b1.center - b2.center)
    v = (b1.center - b2.center) / gap
    x = (b1.center + b2.center) / 2.0 + ((b1.radius - b2.radius) / 2.0) * v
    z = (gap + b1.radius + b2.radius) / 2.0
    return x, z


def test_single_ball():
    res = solve_primal(Instance(2, (ball([3, 4], 2),)))
    assert res.status == "optimal"
    assert np.allclose(res.center, [3, 4]) and res.radius == 2


def test_two_balls_analytic():
    inst = Instance(2, (ball([0, 0], 1), ball([4, 0], 0)))
    res = solve_primal(inst)
    assert res.status == "optimal"
    assert np.allclose(res.center, [1.5, 0.0], atol=1e-9)
    assert res.radius == pytest.approx(2.5, abs=1e-9)


def test_equilateral_triangle_circumcenter():
    inst = Instance(2, (ball([0, 0]), ball([2, 0]), ball([1, math.sqrt(3)])))
    res = solve_primal(inst)
    assert res.status == "optimal"
    assert np.allclose(res.center, [1.0, 1.0 / math.sqrt(3)], atol=1e-9)
    assert res.radius == pytest.approx(2.0 / math.sqrt(3), abs=1e-9)


def test_trace_is_nonincreasing_and_feasible():
    inst, _ = generate_instance(4, 25, 99, radius_max=0.5)
    pre, _ = preprocess_instance(inst)
    res = solve_primal(pre)
    assert res.status == "optimal"
    zs = [t.z for t in res.trace]
    for a, b in zip(zs, zs[1:]):
        assert b <= a + 1e-12
    covs = coverage_values(res.center, pre)
    assert np.max(covs) <= res.radius + 1e-7 * (1.0 + res.radius)


def test_planted_two_ball_support():
    """Two dominant far balls force a support of size two."""
    rng = np.random.default_rng(6)
    fillers = [ball(rng.uniform(-0.2, 0.2, size=3), 0.05) for _ in range(8)]
    inst = Instance(3, tuple(fillers) + (ball([-2, 0, 0], 0.5), ball([2, 0, 0], 0.5)))
    pre, _ = preprocess_instance(inst)
    res = solve_primal(pre)
    assert res.status == "optimal"
    assert res.support == (8, 9)
    x, z = tangency_optimum(pre.balls[8], pre.balls[9])
    assert res.radius == pytest.approx(z, abs=1e-9)


def test_dropped_ball_does_not_cycle():
    """Regression: a just-dropped ball re-entering at a zero step must not loop."""
    inst, _ = generate_instance(3, 21, 51, radius_max=0.0)
    pre, _ = preprocess_instance(inst)
    res = solve_primal(pre)
    assert res.status == "optimal"
    assert validate(pre, res.center, res.radius).ok


def test_random_batch_certified():
    for seed in range(25):
        inst, _ = generate_instance(2 + seed % 4, 5 + seed, seed, radius_max=0.4)
        pre, _ = preprocess_instance(inst)
        res = solve_primal(pre)
        cert = validate(pre, res.center, res.radius)
        assert res.status == "optimal" and cert.ok, (seed, res.status)


def test_custom_start_point_agrees():
    inst, _ = generate_instance(3, 12, 17, radius_max=0.3)
    pre, _ = preprocess_instance(inst)
    a = solve_primal(pre)
    b = solve_primal(pre, x0=np.array([0.9, -0.9, 0.9]))
    assert abs(a.radius - b.radius) <= 1e-8 * (1.0 + a.radius)


def test_support_size_bound():
    for seed in (1, 2, 3, 4, 5):
        inst, _ = generate_instance(3, 15, 200 + seed, radius_max=0.5)
        pre, _ = preprocess_instance(inst)
        res = solve_primal(pre)
        assert res.status == "optimal"
        assert 1 <= len(res.support) <= pre.dim + 1
