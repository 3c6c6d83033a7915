"""Dual active-set solver.

Maintains a ball that is optimal for the subproblem on its active set
(so its radius is a lower bound that never decreases) with its center a
convex combination of the active centers.  Each iteration picks the most
violated ball as the entering candidate, walks the search path that
keeps the active set tied while the radius grows, and stops where the
entering ball's bisector is reached.  If the stopped center leaves the
simplex of the active centers, the binding facet determines a leaving
ball and the walk continues on the reduced set.  Primal feasibility of
the whole instance certifies optimality.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import (
    DEFAULT_TOL,
    coverage_value,
    coverage_values,
    project_onto_span,
    solve_linear,
)
from .conics import (
    DegenerateGeometryError,
    EmptyIntersectionError,
    bisector_residual,
    intersect_sequence,
)
from .result import SolveResult, TraceEntry
from .search import (
    INF,
    conic_path_through,
    crossing_betas,
    entering_hyperplane,
    first_conic_crossing,
    radii_all_equal,
    ray_hyperboloid_crossing,
    sort_by_radius,
    sub_space,
)

_STEP_TOL = 1e-10


def solve_dual(instance, tol=DEFAULT_TOL, max_iter=None, init_pair=None):
    """Minimum covering ball of a preprocessed instance, dual algorithm."""
    m = instance.m
    if m == 0:
        raise ValueError("empty instance")
    if m == 1:
        b = instance.balls[0]
        return SolveResult("optimal", b.center.copy(), b.radius, (0,), 0, "dual",
                           [TraceEntry(0, "init", b.radius, (0,))])
    if max_iter is None:
        max_iter = 100 * m + 100

    j, k = init_pair if init_pair is not None else _far_pair(instance)
    if instance.balls[j].radius < instance.balls[k].radius:
        j, k = k, j
    pj, pk = instance.balls[j].center, instance.balls[k].center
    rj, rk = instance.balls[j].radius, instance.balls[k].radius
    gap = np.linalg.norm(pj - pk)
    x = (pj + pk) / 2.0 + ((rj - rk) / 2.0) * (pj - pk) / gap
    z = coverage_value(x, instance.balls[j])
    support = [j, k]
    trace = [TraceEntry(0, "init", z, tuple(support))]

    it = 0
    while it < max_iter:
        it += 1
        covs = coverage_values(x, instance)
        viol = covs - z
        e = int(np.argmax(viol))
        if viol[e] <= tol.activity * (1.0 + z):
            return SolveResult("optimal", x, z, tuple(sorted(support)), it, "dual", trace)
        # prefer the smallest index among (near-)maximal violations
        ties = np.nonzero(viol >= viol[e] - 1e-12 * (1.0 + z))[0]
        e = int(ties.min())

        support, x = _affine_update(instance, support, x, e, tol)
        x, z, support = _search(instance, support, x, z, e, trace, it, tol)
    return SolveResult("iteration_limit", x, z, tuple(sorted(support)), it, "dual", trace)


def _far_pair(instance):
    """Pair maximizing center distance plus radii (a spread-out start)."""
    C, R = instance.centers(), instance.radii()
    m = instance.m
    if m <= 1500:
        best, pair = -1.0, (0, 1)
        for i in range(m):
            d = np.linalg.norm(C - C[i], axis=1) + R + R[i]
            d[i] = -1.0
            jj = int(np.argmax(d))
            if d[jj] > best:
                best, pair = float(d[jj]), (i, jj)
        return pair
    # double sweep for large instances
    i = 0
    for _ in range(2):
        d = np.linalg.norm(C - C[i], axis=1) + R + R[i]
        d[i] = -1.0
        j = int(np.argmax(d))
        i, prev = j, i
    return (prev, i)


def _affine_update(instance, support, x, e, tol):
    """Drop a ball if adding e would make the support affinely dependent."""
    pts = [instance.balls[i].center for i in support] + [instance.balls[e].center]
    P = np.array(pts)
    D = (P[1:] - P[0]).T
    scale = max(1.0, float(np.linalg.norm(D)))
    if np.linalg.matrix_rank(D, tol=tol.rank * scale) == len(support):
        return support, x
    # lambda: sum = -1, sum lambda_j (x - p_j) = -(x - p_e)
    s = len(support)
    A = np.vstack([np.ones((1, s)),
                   np.column_stack([x - instance.balls[i].center for i in support])])
    b = np.concatenate([[-1.0], -(x - instance.balls[e].center)])
    lam = np.linalg.lstsq(A, b, rcond=None)[0]
    # current barycentric weights of x in the support
    b2 = np.concatenate([[1.0], np.zeros(instance.dim)])
    piv = np.linalg.lstsq(A, b2, rcond=None)[0]
    best, leave = INF, None
    for idx in range(s):
        if lam[idx] < -tol.barycentric:
            ratio = piv[idx] / (-lam[idx])
            if ratio < best - 1e-15:
                best, leave = ratio, support[idx]
    if leave is None:
        # numerically independent after all; keep the set
        return support, x
    return [i for i in support if i != leave], x


def _search(instance, support, x, z, e, trace, it, tol):
    """Walk toward the entering ball's bisector, dropping binding facets."""
    guard = 0
    while True:
        guard += 1
        if guard > len(support) + instance.m + 5:
            raise RuntimeError("dual search failed to terminate")
        support = sort_by_radius(instance, support)
        if radii_all_equal(instance, support, tol):
            step = _ray_search(instance, support, x, e, tol)
        else:
            step = _conic_search(instance, support, x, e, tol)
        x, accepted, leaving = step
        z = coverage_value(x, instance.balls[support[0]])
        if accepted:
            support = support + [e]
            trace.append(TraceEntry(it, "search", z, tuple(support), entering=e))
            return x, z, support
        support = [i for i in support if i != leaving]
        trace.append(TraceEntry(it, "search", z, tuple(support), leaving=leaving))


def _ray_search(instance, support, x, e, tol):
    i1 = support[0]
    p1 = instance.balls[i1].center
    pe = instance.balls[e].center
    w = pe - p1
    d = w - project_onto_span(sub_space(instance, support), w, tol)
    nd = float(np.linalg.norm(d))
    if nd <= tol.zero_direction * (1.0 + np.linalg.norm(w)):
        raise DegenerateGeometryError("entering center lies in the support's affine hull")
    alpha_p = ray_hyperboloid_crossing(x, d, instance.balls[i1], instance.balls[e], tol)

    T, e1 = _t_matrix(instance, support, e, x)
    gamma = np.linalg.lstsq(T, e1, rcond=None)[0]
    dhat = np.concatenate([[0.0], d])
    delta = np.linalg.lstsq(T, dhat, rcond=None)[0]
    if np.isfinite(alpha_p):
        pi = gamma - alpha_p * delta
        if float(np.min(pi)) >= -tol.barycentric:
            return x + alpha_p * d, True, None

    best, leave = INF, None
    for idx in range(len(support)):
        if delta[idx] > tol.zero_direction:
            a_j = gamma[idx] / delta[idx]
            if -_STEP_TOL <= a_j <= alpha_p + _STEP_TOL and a_j < best - 1e-15:
                best, leave = max(a_j, 0.0), support[idx]
    if leave is None:
        raise RuntimeError("no binding facet found on the search ray")
    return x + best * d, False, leave


def _conic_search(instance, support, x, e, tol):
    i1, i_last = support[0], support[-1]
    balls = [instance.balls[i] for i in support]
    conic = intersect_sequence(balls, tol)
    if conic.kind == "ellipse":
        if float((x - conic.center) @ conic.axis) < 0.0:
            conic.axis = -conic.axis
    state = conic_path_through(conic, x, toward=instance.balls[e].center, tol=tol)
    state, beta_p = _entering_crossing(instance, state, conic, i1, i_last, e, x, tol)

    T, e1 = _t_matrix(instance, support, e, conic.center)
    gamma = np.linalg.lstsq(T, e1, rcond=None)[0]
    vhat = np.concatenate([[0.0], conic.axis])
    uhat = np.concatenate([[0.0], state.path.u])
    delta = np.linalg.lstsq(T, vhat, rcond=None)[0]
    xi = np.linalg.lstsq(T, uhat, rcond=None)[0]

    if np.isfinite(beta_p):
        pi = _pi_of_beta(conic, gamma, delta, xi, beta_p)
        if float(np.min(pi)) >= -tol.barycentric:
            return state.path.point(beta_p), True, None

    best, leave = INF, None
    for idx in range(len(support)):
        b_j = _facet_beta(conic, state, gamma[idx], delta[idx], xi[idx],
                          state.beta_start, beta_p, tol)
        if b_j < best - 1e-15:
            best, leave = b_j, support[idx]
    if leave is None:
        b_bis = _facet_beta_bisect(conic, state, gamma, delta, xi, beta_p, tol)
        if b_bis is None:
            raise RuntimeError("no binding facet found on the search path")
        best, leave = b_bis[0], support[b_bis[1]]
    return state.path.point(best), False, leave


def _entering_crossing(instance, state, conic, i1, i_last, e, x, tol):
    """First crossing with the entering bisector; retries the mirrored arm.

    At a vertex both in-plane directions increase the radius, and the
    direction heuristic can pick the arm that never meets the entering
    ball's bisector; in that case the walk must take the opposite one.
    """
    from .conics import parametrize_2d
    from .search import PathState

    def crossing(st):
        try:
            h, dpt = entering_hyperplane(instance, i1, i_last, e, tol)
            beta = first_conic_crossing(st, h, dpt, tol=tol)
        except DegenerateGeometryError:
            return _direct_conic_crossing_up(instance, st, i1, e, tol)
        if not np.isfinite(beta):
            beta = _direct_conic_crossing_up(instance, st, i1, e, tol)
        return beta

    beta_p = crossing(state)
    if not np.isfinite(beta_p) and state.beta_start <= 1e-9:
        mirrored = PathState(parametrize_2d(conic, -state.path.u, tol), 0.0,
                             np.asarray(x, dtype=float))
        beta_m = crossing(mirrored)
        if np.isfinite(beta_m):
            return mirrored, beta_m
    # INF is a legal outcome: the walk must then exit through a facet
    return state, beta_p


def _t_matrix(instance, support, e, base):
    cols = [base - instance.balls[i].center for i in support]
    cols.append(base - instance.balls[e].center)
    T = np.vstack([np.ones((1, len(cols))), np.column_stack(cols)])
    e1 = np.concatenate([[1.0], np.zeros(instance.dim)])
    return T, e1


def _pi_of_beta(conic, gamma, delta, xi, beta):
    if conic.kind == "hyperbola":
        return gamma - conic.a / math.cos(beta) * delta - conic.b * math.tan(beta) * xi
    if conic.kind == "ellipse":
        return gamma - conic.a * math.cos(beta) * delta - conic.b * math.sin(beta) * xi
    ct = conic.c_tilde
    return gamma - ct * beta * beta * delta - 2.0 * ct * beta * xi


def _facet_beta(conic, state, g, dl, xx, beta_lo, beta_hi, tol):
    """Smallest beta in [beta_lo, beta_hi] where a weight component hits 0."""
    from .conics import solve_cos_sin, solve_parabola_quadratic, solve_sec_tan

    if conic.kind == "hyperbola":
        roots = solve_sec_tan(conic.a * dl, conic.b * xx, g, tol)
    elif conic.kind == "ellipse":
        roots = solve_cos_sin(conic.a * dl, conic.b * xx, g, tol)
    else:
        ct = conic.c_tilde
        roots = solve_parabola_quadratic(ct * dl, 2.0 * ct * xx, g, tol)
    best = INF
    for r in roots:
        if not r.valid:
            continue
        cands = [r.beta]
        if conic.kind == "ellipse":
            cands = [r.beta + 2.0 * math.pi * k for k in (-1, 0, 1)]
        for b in cands:
            if beta_lo - _STEP_TOL <= b <= beta_hi + _STEP_TOL:
                best = min(best, max(b, beta_lo))
    return best


def _facet_beta_bisect(conic, state, gamma, delta, xi, beta_p, tol):
    """Bisection fallback: first beta where the minimum weight crosses 0."""
    lo, hi = state.beta_start, beta_p
    if not np.isfinite(hi):
        if conic.kind == "hyperbola":
            hi = math.pi / 2.0 - 1e-9
        elif conic.kind == "ellipse":
            hi = lo + 2.0 * math.pi
        else:
            hi = lo + 1e3 * (1.0 + abs(lo))
    grid = np.linspace(lo, hi, 513)
    prev = _pi_of_beta(conic, gamma, delta, xi, grid[0])
    for g in grid[1:]:
        cur = _pi_of_beta(conic, gamma, delta, xi, g)
        idx = int(np.argmin(cur))
        if cur[idx] < -tol.barycentric and idx < len(gamma) - 1:
            a, b = float(grid[np.searchsorted(grid, g) - 1]), float(g)
            for _ in range(80):
                mid = 0.5 * (a + b)
                if _pi_of_beta(conic, gamma, delta, xi, mid)[idx] < 0.0:
                    b = mid
                else:
                    a = mid
            return 0.5 * (a + b), idx
        prev = cur
    return None


def _direct_conic_crossing_up(instance, state, i1, e, tol):
    """Scan-and-bisect fallback for the entering-bisector crossing."""
    b1, be = instance.balls[i1], instance.balls[e]

    def gap(beta):
        return bisector_residual(b1, be, state.path.point(beta))

    lo = state.beta_start
    hi = (lo + 2.0 * math.pi if state.path.conic.kind == "ellipse"
          else math.pi / 2.0 - 1e-6)
    grid = np.linspace(lo, hi, 2049)
    vals = [gap(b) for b in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            a, b = grid[i], grid[i + 1]
            fa = vals[i]
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = gap(mid)
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            return float(0.5 * (a + b))
    return INF
