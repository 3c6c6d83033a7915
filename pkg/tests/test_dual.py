"""Tests for the dual ascent solver."""

import math

import numpy as np
import pytest

from minball import (
    Ball,
    Instance,
    coverage_values,
    generate_instance,
    preprocess_instance,
    solve_dual,
    solve_primal,
    validate,
)


def ball(center, radius=0.0):
    return Ball(np.asarray(center, dtype=float), float(radius))


def test_single_ball():
    res = solve_dual(Instance(2, (ball([1, 2], 0.5),)))
    assert res.status == "optimal" and res.radius == 0.5


def test_two_balls_tangency_point():
    inst = Instance(2, (ball([0, 0], 1), ball([4, 0], 0)))
    res = solve_dual(inst)
    assert res.status == "optimal"
    assert np.allclose(res.center, [1.5, 0.0], atol=1e-12)
    assert res.radius == pytest.approx(2.5, abs=1e-12)


def test_two_equal_points_midpoint():
    inst = Instance(2, (ball([-1, 0]), ball([1, 0])))
    res = solve_dual(inst)
    assert np.allclose(res.center, [0.0, 0.0], atol=1e-12)
    assert res.radius == pytest.approx(1.0, abs=1e-12)


def test_isoceles_triangle_circumcenter():
    """Walking from the (-1,0),(1,0) pair toward (0,3) ends at the circumcenter."""
    inst = Instance(2, (ball([-1, 0]), ball([1, 0]), ball([0, 3])))
    res = solve_dual(inst, init_pair=(0, 1))
    assert res.status == "optimal"
    assert np.allclose(res.center, [0.0, 4.0 / 3.0], atol=1e-9)
    assert res.radius == pytest.approx(5.0 / 3.0, abs=1e-9)


def test_equilateral_triangle():
    inst = Instance(2, (ball([0, 0]), ball([2, 0]), ball([1, math.sqrt(3)])))
    res = solve_dual(inst)
    assert res.status == "optimal"
    assert res.radius == pytest.approx(2.0 / math.sqrt(3), abs=1e-9)


def test_trace_is_nondecreasing():
    inst, _ = generate_instance(4, 25, 99, radius_max=0.5)
    pre, _ = preprocess_instance(inst)
    res = solve_dual(pre)
    assert res.status == "optimal"
    zs = [t.z for t in res.trace]
    for a, b in zip(zs, zs[1:]):
        assert b >= a - 1e-12


def test_lower_bound_never_exceeds_primal():
    for seed in (3, 14, 15, 92, 65):
        inst, _ = generate_instance(3, 18, seed, radius_max=0.4)
        pre, _ = preprocess_instance(inst)
        d = solve_dual(pre)
        p = solve_primal(pre)
        assert p.radius >= d.radius - 1e-8 * (1.0 + d.radius)


def test_terminal_point_is_feasible():
    inst, _ = generate_instance(5, 30, 7, radius_max=0.5)
    pre, _ = preprocess_instance(inst)
    res = solve_dual(pre)
    covs = coverage_values(res.center, pre)
    assert np.max(covs) <= res.radius + 1e-7 * (1.0 + res.radius)


def test_random_batch_certified():
    for seed in range(25):
        inst, _ = generate_instance(2 + seed % 5, 4 + seed, 500 + seed,
                                    radius_max=0.6)
        pre, _ = preprocess_instance(inst)
        res = solve_dual(pre)
        cert = validate(pre, res.center, res.radius)
        assert res.status == "optimal" and cert.ok, (seed, res.status)


def test_unreachable_entering_bisector_exits_facet():
    """Regression: a walk whose entering ball stays violated to infinity
    must drop a facet instead of failing."""
    inst, _ = generate_instance(3, 10, 1073, radius_max=0.2)
    pre, _ = preprocess_instance(inst)
    res = solve_dual(pre)
    assert res.status == "optimal"
    assert validate(pre, res.center, res.radius).ok


def test_support_size_bound():
    for seed in (1, 2, 3):
        inst, _ = generate_instance(4, 20, 300 + seed, radius_max=0.5)
        pre, _ = preprocess_instance(inst)
        res = solve_dual(pre)
        assert res.status == "optimal"
        assert 1 <= len(res.support) <= pre.dim + 1
