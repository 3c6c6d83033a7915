"""Search-path machinery shared by the primal and dual solvers.

Both solvers walk paths that keep an active set of balls equally hard to
cover: rays inside the common bisector hyperplanes when the active radii
are all equal, otherwise planar sections of the conic produced by
`intersect_sequence`.  This module computes those paths and the
breakpoints where a new ball's bisector (or a simplex facet) is crossed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_TOL, coverage_value, orthonormal_complement_component
from .conics import (
    ConicPath,
    bisector_residual,
    build_bisector,
    build_pair_hyperplane,
    intersect_sequence,
    parametrize_2d,
    solve_cos_sin,
    solve_parabola_quadratic,
    solve_sec_tan,
)

INF = math.inf


def sort_by_radius(instance, support):
    """Active-set indices ordered by non-increasing radius, stable by index."""
    return sorted(support, key=lambda i: (-instance.balls[i].radius, i))


def radii_all_equal(instance, support, tol=DEFAULT_TOL):
    rs = [instance.balls[i].radius for i in support]
    return max(rs) - min(rs) <= tol.radius_equal * (1.0 + max(rs))


def sub_space(instance, support):
    """Spanning vectors of sub(S): differences from the first support point."""
    p0 = instance.balls[support[0]].center
    return [instance.balls[i].center - p0 for i in support[1:]]


# ---------------------------------------------------------------------------
# ray / bisector crossings


def ray_hyperplane_crossing(x0, d, ball_a, ball_b, tol=DEFAULT_TOL):
    """Smallest alpha >= 0 with x0 + alpha d on the equal-radius bisector."""
    n = ball_a.center - ball_b.center
    denom = float(n @ d)
    if abs(denom) <= tol.zero_direction * (1.0 + np.linalg.norm(n) * np.linalg.norm(d)):
        return INF
    alpha = float(n @ ((ball_a.center + ball_b.center) / 2.0 - x0)) / denom
    if alpha < -1e-12:
        return INF
    return max(alpha, 0.0)


def ray_hyperboloid_crossing(x0, d, ball_a, ball_b, tol=DEFAULT_TOL,
                             require_entering=False):
    """Smallest alpha >= 0 with x0 + alpha d on the bisector sheet of a, b.

    Substitutes the ray into the central quadric of the bisector and
    keeps only roots that actually satisfy the coverage equality (the
    quadric has a second sheet that must be discarded).  With
    require_entering, roots where the ray is moving *out* of ball b's
    violation region are skipped as well: just past the root, covering
    b must be at least as hard as covering a.
    """
    bis = build_bisector(ball_a, ball_b, tol)
    if bis.kind == "hyperplane":
        alpha = ray_hyperplane_crossing(x0, d, ball_a, ball_b, tol)
        if require_entering and np.isfinite(alpha) and not _ray_enters(
                x0, d, ball_a, ball_b, alpha):
            return INF
        return alpha
    c, v, a, ecc = bis.center, bis.axis, bis.a, bis.ecc
    w = x0 - c
    dv = float(d @ v)
    wv = float(w @ v)
    A = float(d @ d) - ecc * ecc * dv * dv
    B = 2.0 * float(w @ d) - 2.0 * ecc * ecc * wv * dv
    C = float(w @ w) - ecc * ecc * wv * wv - a * a * (1.0 - ecc * ecc)
    roots = _quadratic_roots(A, B, C, tol)
    scale = 1e-7 * (1.0 + abs(ball_a.radius) + abs(ball_b.radius)
                    + np.linalg.norm(x0 - ball_a.center))
    best = INF
    for alpha in roots:
        if alpha < -1e-12:
            continue
        alpha = max(alpha, 0.0)
        x = x0 + alpha * d
        if abs(bisector_residual(ball_a, ball_b, x)) > scale * (1.0 + alpha * np.linalg.norm(d)):
            continue
        if require_entering and not _ray_enters(x0, d, ball_a, ball_b, alpha):
            continue
        best = min(best, alpha)
    return best


def _ray_enters(x0, d, ball_a, ball_b, alpha):
    """True if just past the crossing, ball b is at least as hard as a.

    Rejects roots where the ray only touches or leaves b's region; in
    particular a ball dropped by the update phase still has the current
    point on its bisector, but the new direction moves away from it.
    """
    xp = x0 + (alpha + 1e-6 * (1.0 + abs(alpha))) * d
    ca = coverage_value(xp, ball_a)
    return coverage_value(xp, ball_b) >= ca - 1e-12 * (1.0 + abs(ca))


def _quadratic_roots(a, b, c, tol):
    scale = max(abs(a), abs(b), abs(c), 1.0)
    if abs(a) <= 1e-14 * scale:
        if abs(b) <= 1e-14 * scale:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if disc > -tol.discriminant * scale * scale:
            disc = 0.0
        else:
            return []
    sq = math.sqrt(disc)
    q = -(b + math.copysign(sq, b)) / 2.0
    out = [q / a]
    if q != 0.0:
        out.append(c / q)
    return out


# ---------------------------------------------------------------------------
# conic paths


@dataclass
class PathState:
    """A directed planar search path on a conic, starting at beta_start."""

    path: ConicPath
    beta_start: float
    x_start: np.ndarray


def conic_path_through(conic, x, toward=None, tol=DEFAULT_TOL):
    """Planar section of `conic` through x, directed by increasing beta.

    The in-plane direction u is taken from the off-axis component of x
    itself (so the curve passes through x exactly); when x sits on the
    axis (at the vertex), the component of `toward` orthogonal to the
    conic's fixed directions is used instead.  u is oriented so that the
    starting parameter is >= 0.
    """
    fixed = conic.fixed_directions()
    w = np.asarray(x, dtype=float) - conic.center
    u = orthonormal_complement_component(w, fixed, tol)
    if u is None:
        if toward is not None:
            u = orthonormal_complement_component(
                np.asarray(toward, dtype=float) - conic.center, fixed, tol)
        if u is None:
            u = _any_orthonormal(fixed, conic.center.shape[0], tol)
    path = parametrize_2d(conic, u, tol)
    beta = path.locate(x, tol)
    if abs(beta) <= 1e-9:
        beta = 0.0
    elif beta < 0.0:
        path = parametrize_2d(conic, -u, tol)
        beta = path.locate(x, tol)
    return PathState(path, max(beta, 0.0), np.asarray(x, dtype=float))


def _any_orthonormal(fixed, n, tol):
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        u = orthonormal_complement_component(e, fixed, tol)
        if u is not None:
            return u
    raise ValueError("no orthogonal direction available")


def crossing_betas(path, normal, point, tol=DEFAULT_TOL):
    """All parameters beta where the planar conic meets a hyperplane.

    The hyperplane is h.x = h.point; substitution gives one of the three
    scalar breakpoint equations depending on the conic kind.  Returns
    the sheet-valid betas (ellipse betas are wrapped to (-pi, pi]).
    """
    conic = path.conic
    h = np.asarray(normal, dtype=float)
    C = float(h @ (np.asarray(point, dtype=float) - conic.center))
    hv = float(h @ conic.axis)
    hu = float(h @ path.u)
    if conic.kind == "hyperbola":
        roots = solve_sec_tan(conic.a * hv, conic.b * hu, C, tol)
    elif conic.kind == "ellipse":
        roots = solve_cos_sin(conic.a * hv, conic.b * hu, C, tol)
    else:
        roots = solve_parabola_quadratic(conic.c_tilde * hv, 2.0 * conic.c_tilde * hu, C, tol)
    return [r.beta for r in roots if r.valid]


def entering_hyperplane(instance, i_first, i_last, k, tol=DEFAULT_TOL):
    """Hyperplane carrying the bisector crossings of ball k with the path.

    The path lies on the bisector of (i_first, i_last); points of it
    that are also on the bisector of (i_first, k) lie on the hyperplane
    through the triple, built from the directrix data of the pairwise
    bisectors.  Returns (normal, point).
    """
    triple = sort_by_radius(instance, [i_first, i_last, k])
    b1, b2, b3 = (instance.balls[i] for i in triple)
    return build_pair_hyperplane(b1, b2, b3, tol)


def first_conic_crossing(path_state, normal, point, beta_max=None, tol=DEFAULT_TOL):
    """Smallest beta >= beta_start where the path meets the hyperplane.

    For ellipses the returned representative is the first one reached
    going forward (wrapping by 2*pi as needed).  Returns INF when the
    curve never crosses within [beta_start, beta_max].
    """
    betas = crossing_betas(path_state.path, normal, point, tol)
    lo = path_state.beta_start - 1e-10
    hi = INF if beta_max is None else beta_max + 1e-10
    best = INF
    for b in betas:
        cands = [b]
        if path_state.path.conic.kind == "ellipse":
            cands = [b + 2.0 * math.pi * k for k in (-1, 0, 1)]
        for bb in cands:
            if lo <= bb <= hi:
                best = min(best, max(bb, path_state.beta_start))
    return best


def first_conic_crossing_down(path_state, normal, point, tol=DEFAULT_TOL,
                              accept=None):
    """Largest beta in [0, beta_start] where the path meets the hyperplane.

    The primal search walks beta *down* from beta_start toward the
    vertex at 0; the first hyperplane crossing encountered is the
    largest beta below the start.  An optional `accept(beta)` predicate
    can veto individual roots (used to skip crossings where the path is
    leaving, not entering, the other ball's region).  Returns -INF when
    there is no acceptable crossing.
    """
    betas = crossing_betas(path_state.path, normal, point, tol)
    lo, hi = -1e-10, path_state.beta_start + 1e-10
    cands = sorted((min(b, path_state.beta_start) for b in betas if lo <= b <= hi),
                   reverse=True)
    for b in cands:
        if accept is None or accept(b):
            return b
    return -INF
