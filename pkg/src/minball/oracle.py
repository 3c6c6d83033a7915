"""Independent checks for covering-ball solutions.

None of this code shares geometry with the active-set solvers: the
subgradient method only evaluates the objective, the enumerator solves
small nonlinear systems per support subset, and the validator checks
the optimality conditions directly.  Together they supply reference
values and certificates for testing the solvers.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import nnls

from .geometry import DEFAULT_TOL, coverage_values, objective

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


# ---------------------------------------------------------------------------
# subgradient descent


def _subgradient_loop_py(C, R, x, c0, iters):
    m, n = C.shape
    best = math.inf
    best_x = x.copy()
    for t in range(1, iters + 1):
        fi = 0
        fv = -math.inf
        for i in range(m):
            d = 0.0
            for j in range(n):
                d += (x[j] - C[i, j]) ** 2
            v = math.sqrt(d) + R[i]
            if v > fv:
                fv = v
                fi = i
        if fv < best:
            best = fv
            best_x = x.copy()
        d = 0.0
        for j in range(n):
            d += (x[j] - C[fi, j]) ** 2
        d = math.sqrt(d)
        if d == 0.0:
            continue
        step = c0 / math.sqrt(t)
        for j in range(n):
            x[j] -= step * (x[j] - C[fi, j]) / d
    return best, best_x


if njit is not None:
    _subgradient_loop = njit(cache=True)(_subgradient_loop_py)
else:  # pragma: no cover
    _subgradient_loop = _subgradient_loop_py


def oracle_subgradient(instance, iters=1_000_000, step_scale=0.01):
    """Minimize the max-coverage objective by plain subgradient descent.

    Steps x <- x - (c0/sqrt(t)) g with g the unit direction toward the
    smallest-index ball of maximum coverage.  c0 is the instance spread
    scaled by `step_scale`: the final oscillation floor is about
    c0/sqrt(iters), so a small multiple of the spread keeps the floor
    well under the comparison tolerances while still letting the
    iterate traverse the whole instance (total travel ~ 2 c0 sqrt(T)).
    Returns (z_best, x_best).
    """
    C = instance.centers()
    R = instance.radii()
    spread = float(np.max(np.ptp(C, axis=0))) + float(np.max(R)) if instance.m > 1 else 1.0
    c0 = max(spread, 1e-9) * step_scale
    x0 = C.mean(axis=0)
    best, best_x = _subgradient_loop(C, R, x0.copy(), c0, iters)
    return float(best), np.asarray(best_x)


# ---------------------------------------------------------------------------
# support enumeration


def oracle_enumerate(instance, tol=DEFAULT_TOL):
    """Exact optimum by enumerating candidate support subsets.

    For every subset of size 1..n+1 the candidate center is the point of
    the subset's affine hull where all subset coverages tie (found by
    Newton's method in affine coordinates); a candidate is kept when it
    covers the whole instance and its barycentric weights are
    nonnegative.  The smallest kept radius is the optimum.  Exponential:
    intended for small instances only.
    """
    m, n = instance.m, instance.dim
    C = instance.centers()
    R = instance.radii()
    best_z, best_x = math.inf, None
    for size in range(1, min(n + 1, m) + 1):
        for subset in itertools.combinations(range(m), size):
            cand = _subset_candidate(C, R, subset, tol)
            if cand is None:
                continue
            x, z = cand
            if z >= best_z - 1e-15:
                continue
            covs = np.linalg.norm(C - x, axis=1) + R
            if np.max(covs) <= z + 1e-7 * (1.0 + z):
                best_z, best_x = z, x
    if best_x is None:
        raise RuntimeError("no candidate subset produced a feasible ball")
    return float(best_z), best_x


def _subset_candidate(C, R, subset, tol):
    """Equal-coverage stationary point of one subset, or None."""
    P = C[list(subset)]
    r = R[list(subset)]
    s = len(subset)
    if s == 1:
        return P[0].copy(), float(r[0])
    V = (P[1:] - P[0]).T                      # n x (s-1) affine directions
    if np.linalg.matrix_rank(V, tol=1e-10 * max(1.0, np.linalg.norm(V))) < s - 1:
        return None
    t = np.full(s - 1, 1.0 / s)               # start near the centroid

    def x_of(t):
        return P[0] + V @ t

    for _ in range(100):
        x = x_of(t)
        d = np.linalg.norm(P - x, axis=1)
        if np.min(d) < 1e-14:
            return None
        g = (d + r)[1:] - (d[0] + r[0])        # tie equations
        if np.max(np.abs(g)) < 1e-12 * (1.0 + d[0]):
            break
        # rows: gradient of ||x-p_i|| - ||x-p_0|| w.r.t. t
        U = (x - P) / d[:, None]
        J = (U[1:] - U[0]) @ V
        try:
            step = np.linalg.solve(J, -g)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        limit = 10.0 * (1.0 + np.linalg.norm(t))
        if np.linalg.norm(step) > limit:
            step *= limit / np.linalg.norm(step)
        t = t + step
    else:
        return None

    x = x_of(t)
    d = np.linalg.norm(P - x, axis=1)
    z = float(d[0] + r[0])
    # barycentric weights: x = sum w_i p_i, w >= 0, sum w = 1
    A = np.vstack([np.ones((1, s)), P.T])
    b = np.concatenate([[1.0], x])
    w = np.linalg.lstsq(A, b, rcond=None)[0]
    if np.min(w) < -1e-9 or np.linalg.norm(A @ w - b) > 1e-8 * (1.0 + z):
        return None
    return x, z


# ---------------------------------------------------------------------------
# certificates


class Certificate:
    """Validation record for a claimed covering ball."""

    def __init__(self, ok, feasibility_margin, kkt_residual, support, barycentric):
        self.ok = bool(ok)
        self.feasibility_margin = float(feasibility_margin)
        self.kkt_residual = float(kkt_residual)
        self.support = tuple(support)
        self.barycentric = barycentric

    def to_dict(self):
        return {
            "ok": self.ok,
            "feasibility_margin": self.feasibility_margin,
            "kkt_residual": self.kkt_residual,
            "support": list(self.support),
            "barycentric": [float(v) for v in self.barycentric],
        }


def validate(instance, x, z, support=None, tol=DEFAULT_TOL,
             margin_tol=1e-7, residual_tol=1e-6):
    """Check feasibility and stationarity of a claimed solution.

    feasibility_margin is min_i (z - coverage_i): nonnegative (within
    margin_tol relative slack) means every ball is covered.  The KKT
    residual is the best nonnegative-multiplier fit to sum(lam) = 1,
    sum lam_i (x - p_i)/||x - p_i|| = 0 over the active balls; small
    residual certifies stationarity.  If `support` is omitted the active
    set is detected from the coverage values.
    """
    x = np.asarray(x, dtype=float)
    covs = coverage_values(x, instance)
    margin = float(z - np.max(covs))
    act_tol = tol.activity * (1.0 + abs(z))
    if support is None:
        support = [int(i) for i in np.nonzero(covs >= z - 10 * act_tol)[0]]
    support = [int(i) for i in support]
    if not support:
        support = [int(np.argmax(covs))]

    # activity of the declared support
    act_err = max(abs(z - covs[i]) for i in support)

    U = []
    dists = []
    for i in support:
        d = x - instance.balls[i].center
        nd = np.linalg.norm(d)
        if nd < 1e-14:
            # center coincides with x: stationary iff that ball alone is binding
            bary = np.zeros(len(support))
            bary[support.index(i)] = 1.0
            ok = margin >= -margin_tol * (1.0 + abs(z))
            return Certificate(ok, margin, 0.0, support, bary)
        U.append(d / nd)
        dists.append(nd)
    A = np.vstack([np.ones((1, len(support))), np.column_stack(U)])
    b = np.concatenate([[1.0], np.zeros(instance.dim)])
    lam, rnorm = nnls(A, b)
    kkt_residual = float(rnorm) + float(act_err / (1.0 + abs(z)))

    total = float(np.sum(lam / np.array(dists))) if np.sum(lam) > 0 else 0.0
    if total > 0:
        bary = (lam / np.array(dists)) / total
    else:
        bary = np.zeros(len(support))
    ok = (margin >= -margin_tol * (1.0 + abs(z))
          and kkt_residual <= residual_tol)
    return Certificate(ok, margin, kkt_residual, support, bary)
