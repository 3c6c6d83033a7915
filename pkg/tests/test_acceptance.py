"""Acceptance suite: one test per release criterion, pinned tolerances.

Criteria 3-5 share a single batch of 100 seeded solves through a
module-scoped fixture so the whole suite stays within its time budget.
"""

import math
import time

import numpy as np
import pytest

from minball import (
    Ball,
    Instance,
    build_pair_hyperplane,
    generate_instance,
    intersect_sequence,
    oracle_enumerate,
    oracle_subgradient,
    parametrize_2d,
    preprocess_instance,
    solve_dual,
    solve_primal,
    solve_cos_sin,
    solve_parabola_quadratic,
    solve_sec_tan,
    validate,
)
from minball.geometry import coverage_value, orthonormal_complement_component


def ball(center, radius=0.0):
    return Ball(np.asarray(center, dtype=float), float(radius))


def analytic_two_ball(b1, b2):
    if b1.radius < b2.radius:
        b1, b2 = b2, b1
    gap = np.linalg.norm(b1.center - b2.center)
    v = (b1.center - b2.center) / gap
    x = (b1.center + b2.center) / 2.0 + ((b1.radius - b2.radius) / 2.0) * v
    z = (gap + b1.radius + b2.radius) / 2.0
    return x, z


# ---------------------------------------------------------------------------
# criterion 1: two-ball analytic optimum


def test_criterion_1_two_ball_analytic_optimum():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    count = 0
    while count < 50:
        n = (2, 5, 10)[count % 3]
        c1, c2 = rng.uniform(-1, 1, size=n), rng.uniform(-1, 1, size=n)
        gap = np.linalg.norm(c1 - c2)
        if gap < 0.1:
            continue
        r1, r2 = rng.uniform(0, 0.4, size=2)
        if max(r1, r2) >= gap + min(r1, r2):
            continue
        inst = Instance(n, (ball(c1, r1), ball(c2, r2)))
        x_star, z_star = analytic_two_ball(*inst.balls)
        for solver in (solve_primal, solve_dual):
            res = solver(inst)
            assert res.status == "optimal"
            assert abs(res.radius - z_star) <= 1e-9
            assert np.linalg.norm(res.center - x_star) <= 1e-9
        count += 1
    assert time.perf_counter() - t0 < 1.0


# ---------------------------------------------------------------------------
# criterion 2: zero-radius reduction against both oracles


def test_criterion_2_zero_radius_oracle_match():
    t0 = time.perf_counter()
    for i in range(30):
        n = 2 + i % 4                      # <= 5
        m = 5 + (i * 3) % 26               # <= 30
        inst, _ = generate_instance(n, m, 7000 + i, radius_max=0.0)
        pre, _ = preprocess_instance(inst)
        z_sub, _ = oracle_subgradient(pre, iters=1_000_000)
        for solver in (solve_primal, solve_dual):
            res = solver(pre)
            assert res.status == "optimal"
            assert abs(res.radius - z_sub) <= 1e-4, (i, solver.__name__)
            if pre.m <= 12:
                z_enum, _ = oracle_enumerate(pre)
                assert abs(res.radius - z_enum) <= 1e-8, (i, solver.__name__)
    assert time.perf_counter() - t0 < 30.0


# ---------------------------------------------------------------------------
# criteria 3-5 share one batch of 100 seeded solves


@pytest.fixture(scope="module")
def agreement_batch():
    runs = []
    t0 = time.perf_counter()
    for i in range(100):
        n = 2 + i % 9                      # <= 10
        m = 5 + (i * 7) % 46               # <= 50
        rmax = (0.0, 0.2, 0.6)[i % 3]
        inst, _ = generate_instance(n, m, 1000 + i, radius_max=rmax)
        pre, _ = preprocess_instance(inst)
        runs.append((pre, solve_primal(pre), solve_dual(pre)))
    return runs, time.perf_counter() - t0


def test_criterion_3_primal_dual_agreement(agreement_batch):
    runs, elapsed = agreement_batch
    for pre, p, d in runs:
        assert p.status == "optimal" and d.status == "optimal"
        assert abs(p.radius - d.radius) <= 1e-6 * (1.0 + d.radius)
        assert (np.linalg.norm(p.center - d.center)
                <= 1e-5 * (1.0 + np.linalg.norm(d.center)))
    assert elapsed < 60.0


def test_criterion_4_bound_monotonicity(agreement_batch):
    runs, _ = agreement_batch
    for pre, p, d in runs:
        pz = [t.z for t in p.trace]
        for a, b in zip(pz, pz[1:]):
            assert b <= a + 1e-12
        dz = [t.z for t in d.trace]
        for a, b in zip(dz, dz[1:]):
            assert b >= a - 1e-12
        assert p.radius >= d.radius - 1e-8


def test_criterion_5_kkt_certification(agreement_batch):
    runs, _ = agreement_batch
    for idx, (pre, p, d) in enumerate(runs):
        for res in (p, d):
            cert = validate(pre, res.center, res.radius)
            assert cert.ok
            assert cert.feasibility_margin >= -1e-7 * (1.0 + res.radius)
            assert cert.kkt_residual <= 1e-6
        if idx < 10:
            # a center perturbed by 1e-3 must no longer certify
            bumped = p.center + 1e-3 / math.sqrt(pre.dim) * np.ones(pre.dim)
            assert not validate(pre, bumped, p.radius).ok


# ---------------------------------------------------------------------------
# criterion 6: conic-engine membership on random active sets


def test_criterion_6_conic_membership():
    rng = np.random.default_rng(99)
    checked = 0
    attempts = 0
    while checked < 200:
        attempts += 1
        assert attempts < 5000, "could not build 200 valid active sets"
        n = 2 + int(rng.integers(0, 7))               # <= 8
        s = 2 + int(rng.integers(0, min(n + 1, 5) - 1))
        pts = rng.uniform(-1, 1, size=(s, n))
        radii = np.sort(rng.uniform(0, 0.6, size=s))[::-1]
        if radii[0] - radii[-1] < 0.05:
            continue
        balls = [ball(p, r) for p, r in zip(pts, radii)]
        pre, rep = preprocess_instance(Instance(n, tuple(balls)))
        if pre.m < s:
            continue
        try:
            conic = intersect_sequence(balls)
        except Exception:
            continue
        u = None
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1.0
            u = orthonormal_complement_component(e, conic.fixed_directions())
            if u is not None:
                break
        if u is None:
            betas, path = [0.0], None
        else:
            path = parametrize_2d(conic, u)
            betas = {"hyperbola": np.linspace(-1.3, 1.3, 200),
                     "ellipse": np.linspace(-math.pi, math.pi, 200),
                     "parabola": np.linspace(-3.0, 3.0, 200)}[conic.kind]
        for beta in betas:
            y = (conic.center + conic.a * conic.axis if path is None
                 else path.point(beta))
            z = coverage_value(y, balls[0])
            for other in balls[1:]:
                assert abs(coverage_value(y, other) - z) <= 1e-7 * (1.0 + z)
            # hyperplane-equivalence: y is on both extreme bisectors of each
            # triple, so it must lie on the triple's carrying hyperplane
            for mid in balls[1:-1]:
                h, dpt = build_pair_hyperplane(balls[0], mid, balls[-1])
                assert abs(float(h @ (y - dpt))) <= 1e-6
        checked += 1


# ---------------------------------------------------------------------------
# criterion 7: scalar solvers versus a dense-scan oracle


def test_criterion_7_scalar_solver_completeness():
    rng = np.random.default_rng(7)
    npts = 1_000_000

    beta_h = np.linspace(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6, npts)
    sec_h, tan_h = 1.0 / np.cos(beta_h), np.tan(beta_h)
    beta_e = np.linspace(-math.pi + 1e-9, math.pi, npts)
    cos_e, sin_e = np.cos(beta_e), np.sin(beta_e)
    beta_p = np.linspace(-20.0, 20.0, npts)

    def check(grid, fvals, roots, residual, scale):
        crossings = np.nonzero(np.signbit(fvals[:-1]) != np.signbit(fvals[1:]))[0]
        step = grid[1] - grid[0]
        # no missed roots: every scan crossing has a solver root nearby
        for i in crossings:
            lo, hi = grid[i] - 2 * step, grid[i + 1] + 2 * step
            assert any(lo <= b <= hi for b in roots), (grid[i], roots)
        # no spurious roots: every solver root has a tiny residual
        for b in roots:
            assert abs(residual(b)) <= 1e-9 * scale(b)

    for _ in range(334):
        A, B, C = rng.uniform(-2, 2, size=3)

        f = A * sec_h + B * tan_h - C
        roots = [r.beta for r in solve_sec_tan(A, B, C) if r.valid]
        check(beta_h, f, roots,
              lambda b: A / math.cos(b) + B * math.tan(b) - C,
              lambda b: max(1.0, abs(A / math.cos(b)) + abs(B * math.tan(b)) + abs(C)))

        f = A * cos_e + B * sin_e - C
        roots = [r.beta for r in solve_cos_sin(A, B, C) if r.valid]
        check(beta_e, f, roots,
              lambda b: A * math.cos(b) + B * math.sin(b) - C,
              lambda b: 1.0)

        f = A * beta_p * beta_p + B * beta_p - C
        roots = [r.beta for r in solve_parabola_quadratic(A, B, C)
                 if abs(r.beta) <= 20.0]
        check(beta_p, f, roots,
              lambda b: A * b * b + B * b - C,
              lambda b: max(1.0, abs(A) * b * b + abs(B * b) + abs(C)))


# ---------------------------------------------------------------------------
# criterion 8: degenerate co-circular instances terminate certified


def test_criterion_8_cocircular_termination():
    rng = np.random.default_rng(88)
    for trial in range(40):
        n = 2 + trial % 4
        k = min(n + 2, 3 + trial % 5)
        V = rng.normal(size=(k, n))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        radius = 0.0 if trial % 2 == 0 else 0.05
        inst = Instance(n, tuple(ball(v, radius) for v in V))
        pre, _ = preprocess_instance(inst)
        for solver in (solve_primal, solve_dual):
            res = solver(pre)
            assert res.status == "optimal", (trial, solver.__name__)
            assert validate(pre, res.center, res.radius).ok
    # exactly symmetric regular polygons, all vertices on the unit circle
    for k in (3, 4, 5, 6, 7):
        pts = [ball([math.cos(2 * math.pi * i / k), math.sin(2 * math.pi * i / k)])
               for i in range(k)]
        inst = Instance(2, tuple(pts))
        for solver in (solve_primal, solve_dual):
            res = solver(inst)
            assert res.status == "optimal"
            assert res.radius == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# criterion 9: scale smoke test


def test_criterion_9_scale_smoke():
    inst, _ = generate_instance(50, 1000, 42, radius_max=0.3)
    pre, _ = preprocess_instance(inst)
    t0 = time.perf_counter()
    res = solve_dual(pre)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    assert res.status == "optimal"
    assert validate(pre, res.center, res.radius).ok
