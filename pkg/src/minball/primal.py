"""Primal active-set solver.

Maintains a feasible covering ball whose radius decreases monotonically.
Each iteration searches along a path that keeps the current active set
tied at the maximum coverage value: a ray inside the common bisector
hyperplanes when all active radii are equal, otherwise a planar section
of the conic carrying all pairwise bisectors.  The step stops either at
the point where the path reaches aff(S) (the radius minimizer on the
path) or at the first bisector of a non-active ball, which then enters
the set.  An update phase solves the stationarity system on the active
set; negative multipliers cause deletions, and a fully nonnegative
solution certifies optimality.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import (
    DEFAULT_TOL,
    coverage_value,
    coverage_values,
    kkt_check,
)
from .conics import DegenerateGeometryError, EmptyIntersectionError
from .result import SolveResult, TraceEntry
from .search import (
    INF,
    conic_path_through,
    entering_hyperplane,
    first_conic_crossing_down,
    radii_all_equal,
    ray_hyperboloid_crossing,
    sort_by_radius,
    sub_space,
)


def solve_primal(instance, tol=DEFAULT_TOL, max_iter=None, x0=None):
    """Minimum covering ball of a preprocessed instance, primal algorithm."""
    m = instance.m
    if m == 0:
        raise ValueError("empty instance")
    if m == 1:
        b = instance.balls[0]
        return SolveResult("optimal", b.center.copy(), b.radius, (0,), 0, "primal",
                           [TraceEntry(0, "init", b.radius, (0,))])
    if max_iter is None:
        max_iter = 100 * m + 100

    x = np.asarray(x0, dtype=float) if x0 is not None else instance.centers().mean(axis=0)
    covs = coverage_values(x, instance)
    z = float(np.max(covs))
    support = [int(np.argmax(covs))]
    trace = [TraceEntry(0, "init", z, tuple(support))]

    it = 0
    while it < max_iter:
        it += 1
        x, z, support, entered, kind, alpha = _search_step(instance, x, z, support, tol)
        trace.append(TraceEntry(it, "search", z, tuple(support), kind,
                                entering=entered, alpha=alpha))

        # feasibility repair: if a crossing was missed, pull in the worst ball
        covs = coverage_values(x, instance)
        worst = int(np.argmax(covs))
        if covs[worst] > z + 1e-9 * (1.0 + z):
            z = float(covs[worst])
            if worst not in support:
                support.append(worst)
            continue

        done, x, z, support = _update_phase(instance, x, z, support, trace, it, tol)
        if done:
            return SolveResult("optimal", x, z, tuple(sorted(support)), it, "primal", trace)
    return SolveResult("iteration_limit", x, z, tuple(sorted(support)), it, "primal", trace)


def _search_step(instance, x, z, support, tol):
    """One primal search move; returns (x, z, support, entered, kind, alpha)."""
    support = sort_by_radius(instance, support)
    i1 = support[0]
    p1 = instance.balls[i1].center
    if radii_all_equal(instance, support, tol):
        return _ray_step(instance, x, z, support, tol)

    i_last = support[-1]
    try:
        conic = _oriented_conic(instance, support, x, tol)
    except (EmptyIntersectionError, DegenerateGeometryError):
        # conic construction failed (degenerate active set); fall back to
        # the stationarity solve which will prune the set
        return x, z, support, None, "degenerate", 0.0

    state = conic_path_through(conic, x, toward=p1, tol=tol)
    if state.beta_start <= 1e-12:
        return x, z, support, None, conic.kind, 0.0

    # first entering bisector met while walking down to the vertex
    best_beta, entering = -INF, None
    for k in range(instance.m):
        if k in support:
            continue
        try:
            h, dpt = entering_hyperplane(instance, i1, i_last, k, tol)
        except DegenerateGeometryError:
            bk = _direct_conic_crossing_down(instance, state, i1, k, tol)
            if bk > best_beta + 1e-12:
                best_beta, entering = bk, k
            continue
        bk = first_conic_crossing_down(state, h, dpt, tol,
                                       accept=_enters_down(instance, state, i1, k))
        if bk > best_beta + 1e-12 or (bk > best_beta - 1e-12 and entering is not None
                                      and bk > -INF and k < entering):
            best_beta, entering = bk, k
    if best_beta <= 1e-12:   # includes -INF: no crossing before the vertex
        best_beta, entering = 0.0, None
    x_new = state.path.point(best_beta)
    z_new = coverage_value(x_new, instance.balls[i1])
    alpha = state.beta_start - best_beta
    if entering is not None:
        support = support + [entering]
    return x_new, z_new, support, entering, conic.kind, alpha


def _ray_step(instance, x, z, support, tol):
    i1 = support[0]
    p1 = instance.balls[i1].center
    w = p1 - x
    d = w - _proj_sub(instance, support, w, tol)
    nd = float(np.linalg.norm(d))
    if nd <= tol.zero_direction * (1.0 + np.linalg.norm(w)):
        return x, z, support, None, "ray", 0.0
    alpha_hat = float(w @ d) / (nd * nd)

    best_alpha, entering = alpha_hat, None
    for k in range(instance.m):
        if k in support:
            continue
        a_k = ray_hyperboloid_crossing(x, d, instance.balls[i1], instance.balls[k],
                                       tol, require_entering=True)
        if a_k < best_alpha - 1e-12 or (a_k < best_alpha + 1e-12 and entering is not None
                                        and a_k < INF and k < entering):
            best_alpha, entering = a_k, k
    best_alpha = max(0.0, min(best_alpha, alpha_hat))
    x_new = x + best_alpha * d
    z_new = coverage_value(x_new, instance.balls[i1])
    if entering is not None and best_alpha < alpha_hat - 1e-12:
        support = support + [entering]
    else:
        entering = None
    return x_new, z_new, support, entering, "ray", best_alpha


def _update_phase(instance, x, z, support, trace, it, tol):
    """Stationarity solve with deletions.  Returns (optimal?, x, z, support)."""
    while True:
        kkt = kkt_check(instance, support, x, tol)
        if kkt.status == "no_solution":
            return False, x, z, support
        if kkt.status == "optimal":
            covs = coverage_values(x, instance)
            worst = int(np.argmax(covs))
            if covs[worst] > z + 1e-8 * (1.0 + z):
                # not globally feasible: keep iterating with the worst ball
                if worst not in support:
                    support.append(worst)
                return False, x, float(covs[worst]), support
            return True, x, z, support
        drop = support[kkt.drop_index]
        support = [i for i in support if i != drop]
        trace.append(TraceEntry(it, "update", z, tuple(support), leaving=drop))
        if not support:
            return False, x, z, [int(np.argmax(coverage_values(x, instance)))]


def _enters_down(instance, state, i1, k):
    """Predicate: crossing at beta is a genuine entry into ball k's region.

    Probes the path just past the root (in the walking direction, i.e.
    at slightly smaller beta) and requires ball k to be at least as hard
    to cover as the reference active ball there.  Without this, a ball
    just dropped by the update phase would re-enter at a zero-length
    step (the current point still lies on its bisector) and cycle.
    """
    b1, bk = instance.balls[i1], instance.balls[k]
    delta = 1e-6 * (1.0 + state.beta_start)

    def accept(beta):
        xp = state.path.point(beta - delta)
        c1 = coverage_value(xp, b1)
        return coverage_value(xp, bk) >= c1 - 1e-12 * (1.0 + abs(c1))

    return accept


def _proj_sub(instance, support, w, tol):
    from .geometry import project_onto_span

    return project_onto_span(sub_space(instance, support), w, tol)


def _oriented_conic(instance, support, x, tol):
    """Conic for the sorted support, axis oriented for a descending walk."""
    from .conics import intersect_sequence

    balls = [instance.balls[i] for i in support]
    conic = intersect_sequence(balls, tol)
    if conic.kind == "ellipse":
        # walk toward the vertex on x's side of the center
        if float((x - conic.center) @ conic.axis) < 0.0:
            conic.axis = -conic.axis
    return conic


def _direct_conic_crossing_down(instance, state, i1, k, tol):
    """Fallback crossing search when the triple hyperplane is degenerate.

    Scans the bisector gap of (i1, k) along the path from beta_start
    down to 0 and refines sign changes by bisection.
    """
    from .conics import bisector_residual

    b1, bk = instance.balls[i1], instance.balls[k]

    def gap(beta):
        return bisector_residual(b1, bk, state.path.point(beta))

    accept = _enters_down(instance, state, i1, k)
    lo, hi = 0.0, state.beta_start
    grid = np.linspace(hi, lo, 257)
    vals = [gap(b) for b in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            if accept(float(grid[i])):
                return float(grid[i])
            continue
        if vals[i] * vals[i + 1] < 0.0:
            a, b = grid[i + 1], grid[i]
            fa = vals[i + 1]
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = gap(mid)
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            root = float(0.5 * (a + b))
            if accept(root):
                return root
    return -INF
