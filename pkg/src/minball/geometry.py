"""Core geometric types and linear-algebra helpers.

The central problem: given m balls (p_i, r_i) in R^n, find the smallest
ball (x, z) that contains them all.  A ball (x, z) covers (p, r) exactly
when z >= ||x - p|| + r, so the objective is

    f(x) = max_i ( ||x - p_i|| + r_i )

and the optimal radius is z* = min_x f(x).  We call ||x - p_i|| + r_i the
*coverage value* of ball i at x.

All solvers assume the instance is in *general position* in one weak
sense only: no input ball contains another.  `preprocess_instance`
enforces that by dropping dominated balls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


# ---------------------------------------------------------------------------
# tolerances


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used throughout the package.

    Each entry is a *relative* factor; call sites scale by the natural
    magnitude of the quantity being compared (radius, objective value,
    matrix norm, ...).
    """

    radius_equal: float = 1e-9      # |r_a - r_b| <= radius_equal * (1 + max(r_a, r_b))
    activity: float = 1e-7          # |z - coverage| <= activity * (1 + z)
    rank: float = 1e-10             # singular values below rank * ||A|| count as zero
    barycentric: float = 1e-9       # weight nonnegativity slack
    parabola_band: float = 1e-8     # |ecc - 1| below this is treated as parabolic
    discriminant: float = 1e-12     # near-tangent discriminant clamp
    zero_direction: float = 1e-12   # direction vectors shorter than this are zero


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# basic types


@dataclass(frozen=True)
class Ball:
    """A Euclidean ball given by center and radius (radius >= 0)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")


@dataclass(frozen=True)
class Instance:
    """A covering problem: dim plus a tuple of balls."""

    dim: int
    balls: tuple

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple(self.balls))
        for b in self.balls:
            if b.center.shape != (self.dim,):
                raise ValueError("ball center dimension mismatch")

    @property
    def m(self):
        return len(self.balls)

    def centers(self):
        """All centers stacked into an (m, dim) array."""
        return np.array([b.center for b in self.balls], dtype=float)

    def radii(self):
        return np.array([b.radius for b in self.balls], dtype=float)


@dataclass
class CoveringBall:
    """A candidate solution: center x, radius z, and the support set."""

    center: np.ndarray
    radius: float
    support: tuple = ()


@dataclass
class KKTSolution:
    """Outcome of the stationarity solve on an active set.

    status is one of 'optimal', 'negative_multiplier', 'no_solution'.
    lambdas are the multipliers of the coverage constraints (sum to 1);
    weights are the barycentric coordinates of x in the support points.
    """

    status: str
    lambdas: np.ndarray | None = None
    weights: np.ndarray | None = None
    drop_index: int | None = None
    residual: float = np.inf


# ---------------------------------------------------------------------------
# coverage


def coverage_value(x, ball):
    """Radius a ball centered at x needs to cover `ball`: ||x - p|| + r."""
    return float(np.linalg.norm(np.asarray(x, dtype=float) - ball.center)) + ball.radius


def coverage_values(x, instance):
    """Coverage values of every ball at x, as an array of length m."""
    d = np.linalg.norm(instance.centers() - np.asarray(x, dtype=float), axis=1)
    return d + instance.radii()


def objective(x, instance):
    """max_i coverage_value(x, ball_i): the smallest covering radius at x."""
    return float(np.max(coverage_values(x, instance)))


# ---------------------------------------------------------------------------
# preprocessing


@dataclass
class PreprocessReport:
    """What `preprocess_instance` removed and why."""

    kept: list = field(default_factory=list)        # original indices that survive
    removed: list = field(default_factory=list)     # (index, reason) pairs
    trivial: bool = False                           # one input ball covers everything


def _contains(a, b, tol):
    """True if ball a contains ball b: r_a >= ||p_a - p_b|| + r_b (with slack)."""
    return a.radius + tol * (1.0 + a.radius) >= np.linalg.norm(a.center - b.center) + b.radius


def preprocess_instance(instance, tol=DEFAULT_TOL):
    """Drop every ball contained in another ball.

    The solvers require that no remaining ball contains another (ties --
    duplicate balls -- keep the earliest copy).  Returns (instance, report);
    report.trivial is set when a single input ball covers the whole
    instance, in which case that ball is the optimum.
    """
    balls = instance.balls
    m = len(balls)
    eps = tol.radius_equal
    removed = {}
    for i in range(m):
        if i in removed:
            continue
        for j in range(m):
            if j == i or j in removed:
                continue
            if _contains(balls[i], balls[j], eps):
                # on exact ties (duplicates) keep the smaller index
                if _contains(balls[j], balls[i], eps) and j < i:
                    continue
                removed[j] = i
    kept = [i for i in range(m) if i not in removed]
    report = PreprocessReport(
        kept=kept,
        removed=[(j, f"contained in ball {i}") for j, i in sorted(removed.items())],
        trivial=(len(kept) == 1 and m > 1),
    )
    out = Instance(instance.dim, tuple(balls[i] for i in kept))
    return out, report


# ---------------------------------------------------------------------------
# linear algebra helpers


def project_onto_span(vectors, w, tol=DEFAULT_TOL):
    """Orthogonal projection of w onto span(vectors).

    vectors is a sequence (possibly empty or linearly dependent) of
    arrays; returns the projection (an array of the same shape as w).
    """
    w = np.asarray(w, dtype=float)
    if len(vectors) == 0:
        return np.zeros_like(w)
    V = np.array(vectors, dtype=float).T          # columns span the subspace
    q, r = np.linalg.qr(V)
    # discard columns of q corresponding to (near) zero diagonal of r
    keep = np.abs(np.diag(r)) > tol.rank * max(1.0, np.linalg.norm(V))
    q = q[:, keep]
    return q @ (q.T @ w)


def orthonormal_complement_component(w, basis, tol=DEFAULT_TOL):
    """Component of w orthogonal to span(basis), or None if negligible."""
    w = np.asarray(w, dtype=float)
    res = w - project_onto_span(basis, w, tol)
    nrm = np.linalg.norm(res)
    if nrm <= tol.zero_direction * (1.0 + np.linalg.norm(w)):
        return None
    return res / nrm


@dataclass
class LinearSolveResult:
    status: str                 # 'unique', 'underdetermined', 'no_solution'
    x: np.ndarray | None
    residual: float
    rank: int


def solve_linear(A, b, tol=DEFAULT_TOL):
    """Least-squares solve of A x = b with a consistency check.

    status is 'no_solution' when the least-squares residual shows b is
    not in the column space, 'underdetermined' when A is column-rank
    deficient (the min-norm solution is returned), else 'unique'.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, np.linalg.norm(A))
    x, _, rank, _ = np.linalg.lstsq(A, b, rcond=tol.rank)
    residual = float(np.linalg.norm(A @ x - b))
    if residual > 1e-8 * (1.0 + np.linalg.norm(b)) * scale:
        return LinearSolveResult("no_solution", None, residual, rank)
    status = "underdetermined" if rank < A.shape[1] else "unique"
    return LinearSolveResult(status, x, residual, rank)


# ---------------------------------------------------------------------------
# multiplier changes of variables


def lambdas_to_weights(lambdas, distances):
    """Convert constraint multipliers to barycentric weights.

    weights_i is proportional to lambda_i / ||x - p_i||; with sum 1 the
    stationarity condition sum lambda_i (x - p_i)/||x - p_i|| = 0 becomes
    x = sum weights_i p_i.
    """
    lam = np.asarray(lambdas, dtype=float)
    d = np.asarray(distances, dtype=float)
    w = lam / d
    return w / np.sum(w)


def weights_to_lambdas(weights, distances):
    """Inverse of `lambdas_to_weights`."""
    w = np.asarray(weights, dtype=float)
    d = np.asarray(distances, dtype=float)
    lam = w * d
    return lam / np.sum(lam)


# ---------------------------------------------------------------------------
# stationarity check on an active set


def kkt_check(instance, support, x, tol=DEFAULT_TOL):
    """Solve the stationarity system on the active set `support` at x.

    Unknowns are multipliers lambda over the support satisfying
    sum lambda = 1 and sum lambda_i (x - p_i)/||x - p_i|| = 0.  Returns a
    KKTSolution: 'optimal' if a solution with all lambda >= -tol exists,
    'negative_multiplier' (with the most negative index in drop_index) if
    the solution has a negative entry, 'no_solution' if the system is
    inconsistent (x is not in the affine hull of the support).
    """
    x = np.asarray(x, dtype=float)
    s = len(support)
    n = instance.dim
    U = np.zeros((n, s))
    dists = np.zeros(s)
    for j, i in enumerate(support):
        d = x - instance.balls[i].center
        nd = np.linalg.norm(d)
        if nd <= tol.zero_direction:
            # x sits on a support center; that ball alone pins the solution
            lam = np.zeros(s)
            lam[j] = 1.0
            return KKTSolution("optimal", lam, lam.copy(), None, 0.0)
        U[:, j] = d / nd
        dists[j] = nd
    A = np.vstack([np.ones((1, s)), U])
    b = np.zeros(n + 1)
    b[0] = 1.0
    res = solve_linear(A, b, tol)
    if res.status == "no_solution":
        return KKTSolution("no_solution", residual=res.residual)
    lam = res.x
    if np.min(lam) < -tol.barycentric:
        return KKTSolution(
            "negative_multiplier",
            lam,
            lambdas_to_weights(lam, dists) if np.sum(lam / dists) != 0 else None,
            int(np.argmin(lam)),
            res.residual,
        )
    return KKTSolution("optimal", lam, lambdas_to_weights(np.maximum(lam, 0.0) + 1e-300, dists),
                       None, res.residual)


def affinely_independent(points, tol=DEFAULT_TOL):
    """True if the given points are affinely independent."""
    P = np.array(points, dtype=float)
    if len(P) <= 1:
        return True
    D = P[1:] - P[0]
    scale = max(1.0, np.linalg.norm(D))
    rank = np.linalg.matrix_rank(D, tol=tol.rank * scale)
    return rank == len(P) - 1
