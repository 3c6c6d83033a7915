"""Bisectors of coverage and their intersections.

Two balls (p_j, r_j), (p_k, r_k) split space by which of them is harder
to cover: the *bisector* is the set where the coverage values agree,

    ||x - p_j|| + r_j = ||x - p_k|| + r_k.

For equal radii it is the perpendicular-bisector hyperplane of the
centers; otherwise it is a single sheet of a hyperboloid of revolution
with foci at the centers (the sheet bending around the larger ball).

Intersecting one such sheet with s-2 hyperplanes produces a lower
dimensional conic (a sheet of a hyperboloid, an ellipsoid, or a
paraboloid).  `intersect_sequence` carries the closed-form recurrence:
each hyperplane cut maps the canonical parameters (center, axis,
semi-axis, eccentricity) of the current conic to those of the cut.
The recurrence is exercised by the solvers, whose search paths are
planar sections of these conics parametrized by secant/tangent,
cosine/sine, or a quadratic, and whose breakpoints are the roots of

    A sec(b) + B tan(b) = C,   A cos(b) + B sin(b) = C,   A b^2 + B b = C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    DEFAULT_TOL,
    Ball,
    coverage_value,
    orthonormal_complement_component,
)


class GeometryError(Exception):
    """Base class for geometric failures in conic construction."""


class EmptyIntersectionError(GeometryError):
    """The requested bisector intersection contains no point."""


class DegenerateGeometryError(GeometryError):
    """Input positions are too degenerate for a conic parametrization."""


# ---------------------------------------------------------------------------
# pairwise bisectors


@dataclass
class Bisector:
    """Coverage bisector of two balls.

    kind 'hyperplane' (equal radii): described by (normal, point).
    kind 'hyperboloid' (strict radii): one sheet, with focal parameters
    center (midpoint of the centers), unit axis pointing toward the
    larger ball, a = (r_hi - r_lo)/2, focal half-distance c_param,
    eccentricity ecc = c_param / a > 1, and the directrix foot point
    center + (a^2/c_param) * axis.
    """

    kind: str
    ball_hi: Ball
    ball_lo: Ball
    normal: np.ndarray | None = None
    point: np.ndarray | None = None
    center: np.ndarray | None = None
    axis: np.ndarray | None = None
    a: float = 0.0
    c_param: float = 0.0
    ecc: float = 0.0
    b2: float = 0.0
    vertex: np.ndarray | None = None
    directrix_point: np.ndarray | None = None


def bisector_residual(ball_hi, ball_lo, x):
    """Signed coverage gap at x; zero exactly on the bisector."""
    return coverage_value(x, ball_hi) - coverage_value(x, ball_lo)


def build_bisector(ball_a, ball_b, tol=DEFAULT_TOL):
    """Construct the coverage bisector of two balls.

    Requires that neither ball contains the other.  Radii within the
    equality tolerance give a hyperplane; otherwise the hyperboloid
    sheet around the larger ball.
    """
    gap = np.linalg.norm(ball_a.center - ball_b.center)
    r_eq = tol.radius_equal * (1.0 + max(ball_a.radius, ball_b.radius))
    if gap <= tol.zero_direction:
        raise DegenerateGeometryError("coincident centers have no bisector")
    if abs(ball_a.radius - ball_b.radius) >= gap - r_eq:
        raise DegenerateGeometryError("one ball contains the other; no bisector")
    if abs(ball_a.radius - ball_b.radius) <= r_eq:
        hi, lo = ball_a, ball_b
        normal = (hi.center - lo.center) / gap
        return Bisector("hyperplane", hi, lo, normal=normal,
                        point=(hi.center + lo.center) / 2.0)
    hi, lo = (ball_a, ball_b) if ball_a.radius > ball_b.radius else (ball_b, ball_a)
    center = (hi.center + lo.center) / 2.0
    axis = (hi.center - lo.center) / gap
    a = (hi.radius - lo.radius) / 2.0
    c_param = gap / 2.0
    ecc = c_param / a
    b2 = c_param * c_param - a * a
    return Bisector(
        "hyperboloid", hi, lo,
        center=center, axis=axis, a=a, c_param=c_param, ecc=ecc, b2=b2,
        vertex=center + a * axis,
        directrix_point=center + (a * a / c_param) * axis,
    )


def quadratic_form_residual(x, center, axis, a, ecc):
    """Residual of the central-quadric equation at x.

    (x-c)'(x-c) - ecc^2 ((x-c).v)^2 - a^2 (1 - ecc^2); zero on the full
    quadric (both sheets for a hyperboloid).
    """
    d = np.asarray(x, dtype=float) - center
    t = float(d @ axis)
    return float(d @ d) - ecc * ecc * t * t - a * a * (1.0 - ecc * ecc)


def paraboloid_residual(x, vertex, axis, c_tilde):
    """Residual of (x-vhat)'(I-vv')(x-vhat) - 4 c_tilde v.(x-vhat)."""
    d = np.asarray(x, dtype=float) - vertex
    t = float(d @ axis)
    return float(d @ d) - t * t - 4.0 * c_tilde * t


# ---------------------------------------------------------------------------
# the hyperplane through the intersection of two bisectors


def build_pair_hyperplane(ball_1, ball_2, ball_3, tol=DEFAULT_TOL):
    """Hyperplane containing the intersection of bisectors B(1,2) and B(1,3).

    Input balls must be ordered by non-increasing radius with
    r_1 > r_3 strictly (all-equal triples have no single such
    hyperplane through both perpendicular bisectors in general).
    Returns (normal, point) with unit normal.

    If the top two radii tie, the bisector B(1,2) *is* a hyperplane and
    is returned; likewise B(2,3) when the bottom two tie.  In the strict
    case the normal combines the weighted axes of the two hyperboloids
    and the point is found on the directrix lines.
    """
    r_eq = tol.radius_equal * (1.0 + ball_1.radius)
    if not (ball_1.radius >= ball_2.radius - r_eq and ball_2.radius >= ball_3.radius - r_eq):
        raise ValueError("balls must be ordered by non-increasing radius")
    if ball_1.radius - ball_3.radius <= r_eq:
        raise DegenerateGeometryError("all three radii equal; use hyperplane bisectors directly")

    if ball_1.radius - ball_2.radius <= r_eq:
        bis = build_bisector(ball_1, ball_2, tol)
        return bis.normal.copy(), bis.point.copy()
    if ball_2.radius - ball_3.radius <= r_eq:
        bis = build_bisector(ball_2, ball_3, tol)
        return bis.normal.copy(), bis.point.copy()

    b12 = build_bisector(ball_1, ball_2, tol)
    b13 = build_bisector(ball_1, ball_3, tol)
    h = b12.ecc * b12.axis - b13.ecc * b13.axis
    nh = np.linalg.norm(h)
    if nh <= tol.zero_direction:
        raise DegenerateGeometryError("bisector axes coincide; no pair hyperplane")
    h = h / nh
    w = h - (h @ b13.axis) * b13.axis
    nw = np.linalg.norm(w)
    if nw <= tol.zero_direction:
        raise DegenerateGeometryError("pair hyperplane normal parallel to bisector axis")
    w = w / nw
    denom = b12.axis @ w
    if abs(denom) <= tol.zero_direction:
        raise DegenerateGeometryError("directrix lines do not meet transversally")
    step = (b12.axis @ (b12.directrix_point - b13.directrix_point)) / denom
    point = b13.directrix_point + step * w
    return h, point


# ---------------------------------------------------------------------------
# conic sections from chained hyperplane cuts


@dataclass
class ConicSection:
    """Canonical parameters of a bisector sheet cut by hyperplanes.

    kind 'hyperbola': center, unit axis toward the sheet vertex,
        a > 0, b = a * sqrt(ecc^2 - 1), ecc > 1; vertex center + a*axis.
    kind 'ellipse': center, axis, a >= b > 0, ecc < 1.
    kind 'parabola': center is the vertex, axis the symmetry axis,
        c_tilde the (signed) focal parameter.

    hp lists the orthonormalized hyperplane normals that were folded in;
    every point of the conic (of any planar section of it) stays inside
    those hyperplanes.  ball_hi/ball_lo are the extreme-radius pair whose
    bisector sheet the conic lies on, kept for membership residuals.
    """

    kind: str
    center: np.ndarray
    axis: np.ndarray
    a: float
    b: float
    ecc: float
    c_tilde: float = 0.0
    hp: list = field(default_factory=list)
    ball_hi: Ball | None = None
    ball_lo: Ball | None = None

    def sheet_residual(self, x):
        return bisector_residual(self.ball_hi, self.ball_lo, x)

    def fixed_directions(self):
        """Directions spanned by the axis and folded normals."""
        return [self.axis] + list(self.hp)


def classify_hyperplane_conic(ecc, rho, tol=DEFAULT_TOL):
    """Kind of conic a hyperplane cut produces: new eccentricity is ecc*rho."""
    e = ecc * rho
    if abs(e - 1.0) <= tol.parabola_band:
        return "parabola"
    return "hyperbola" if e > 1.0 else "ellipse"


def _sheet_scale(conic_or_bis):
    return 1.0 + abs(conic_or_bis.ball_hi.radius) + abs(conic_or_bis.ball_lo.radius)


def _orient_hyperbola_sheet(conic, tol):
    """Flip the axis so the vertex center + a*axis lies on the bisector sheet."""
    scale = 1e-6 * _sheet_scale(conic)
    v_plus = conic.center + conic.a * conic.axis
    v_minus = conic.center - conic.a * conic.axis
    r_plus = abs(conic.sheet_residual(v_plus))
    r_minus = abs(conic.sheet_residual(v_minus))
    if r_plus <= r_minus:
        if r_plus > scale:
            raise EmptyIntersectionError("hyperbola vertex misses the bisector sheet")
        return conic
    if r_minus > scale:
        raise EmptyIntersectionError("hyperbola vertex misses the bisector sheet")
    conic.axis = -conic.axis
    return conic


def _check_on_sheet(conic, probe, tol):
    if abs(conic.sheet_residual(probe)) > 1e-6 * _sheet_scale(conic):
        raise EmptyIntersectionError("cut lies on the far sheet of the bisector")


def intersect_sequence(balls, tol=DEFAULT_TOL):
    """Conic through all pairwise bisectors of `balls`.

    balls must be ordered by non-increasing radius with a strict drop
    from first to last.  Starts from the bisector sheet of the extreme
    pair and folds in, for each middle ball, the hyperplane that carries
    its bisector intersections (so the result meets *every* pairwise
    bisector).  Raises EmptyIntersectionError when a cut removes the
    sheet entirely, DegenerateGeometryError for collapsed geometry.
    """
    s = len(balls)
    if s < 2:
        raise ValueError("need at least two balls")
    first, last = balls[0], balls[-1]
    base = build_bisector(first, last, tol)
    if base.kind != "hyperboloid":
        raise DegenerateGeometryError("extreme radii equal; intersection is not a conic")

    conic = ConicSection(
        "hyperbola", base.center.copy(), base.axis.copy(),
        base.a, math.sqrt(base.b2), base.ecc,
        hp=[], ball_hi=base.ball_hi, ball_lo=base.ball_lo,
    )
    planes = []   # (normal, offset) of every folded hyperplane, original normals

    for mid in balls[1:-1]:
        h, d_pt = build_pair_hyperplane(first, mid, last, tol)
        planes.append((h, float(h @ d_pt)))
        hp = orthonormal_complement_component(h, conic.hp, tol)
        if hp is None:
            # dependent hyperplane: consistent iff the current conic already
            # satisfies it; probe with the center/vertex
            if abs(h @ conic.center - h @ d_pt) > 1e-7 * (1.0 + np.linalg.norm(d_pt)):
                raise EmptyIntersectionError("inconsistent dependent hyperplane cut")
            continue
        # a point in the intersection of all planes folded so far, nearest
        # to the current center: gives the offset of the new cut along hp
        N = np.array([p[0] for p in planes])
        rhs = np.array([p[1] for p in planes]) - N @ conic.center
        y = conic.center + np.linalg.lstsq(N, rhs, rcond=None)[0]
        h_off = float(hp @ (y - conic.center))

        if conic.kind == "parabola":
            raise DegenerateGeometryError(
                "cutting a paraboloid section is not supported")
        conic = _fold_hyperplane(conic, hp, h_off, tol)

    if conic.kind == "hyperbola":
        conic = _orient_hyperbola_sheet(conic, tol)
        _check_on_sheet(conic, conic.center + conic.a * conic.axis, tol)
    elif conic.kind == "ellipse":
        _check_on_sheet(conic, conic.center + conic.a * conic.axis, tol)
    else:
        _check_on_sheet(conic, conic.center, tol)
    return conic


def _fold_hyperplane(conic, hp, h_off, tol):
    """Cut the central conic by the plane hp.(x - center) = h_off."""
    ecc, a = conic.ecc, conic.a
    sigma = float(conic.axis @ hp)
    rho_sq = max(0.0, 1.0 - sigma * sigma)
    rho = math.sqrt(rho_sq)

    if rho <= 1e-9:
        # cut perpendicular to the axis: a spherical slice
        t = h_off * sigma           # offset along the axis (hp = +-axis)
        rad_sq = (1.0 - ecc * ecc) * (a * a - t * t)
        if rad_sq <= 0.0:
            raise EmptyIntersectionError("perpendicular cut misses the sheet")
        rad = math.sqrt(rad_sq)
        new_axis = orthonormal_complement_component(
            _any_unit_not_parallel(conic.axis), [conic.axis] + conic.hp, tol)
        if new_axis is None:
            raise DegenerateGeometryError("no direction left for the section axis")
        center = conic.center + t * conic.axis
        return ConicSection("ellipse", center, new_axis, rad, rad, 0.0,
                            hp=conic.hp + [hp], ball_hi=conic.ball_hi,
                            ball_lo=conic.ball_lo)

    new_axis = conic.axis - sigma * hp
    new_axis = new_axis / np.linalg.norm(new_axis)
    e_new = ecc * rho
    kind = classify_hyperplane_conic(ecc, rho, tol)

    if kind == "parabola":
        if conic.kind != "hyperbola":
            raise DegenerateGeometryError("parabolic cut of a non-hyperbolic section")
        c_tilde = ecc * sigma * h_off / 2.0
        if abs(c_tilde) <= tol.zero_direction * (1.0 + a):
            raise DegenerateGeometryError("degenerate parabolic cut")
        b_sq = conic.b * conic.b
        t0 = ((1.0 - ecc * ecc * sigma * sigma) * h_off * h_off + b_sq) / (4.0 * c_tilde)
        vertex = conic.center + h_off * hp + t0 * new_axis
        out = ConicSection("parabola", vertex, new_axis, 0.0, 0.0, 1.0,
                           c_tilde=c_tilde, hp=conic.hp + [hp],
                           ball_hi=conic.ball_hi, ball_lo=conic.ball_lo)
        return out

    denom = 1.0 - e_new * e_new
    t0 = ecc * ecc * rho * sigma * h_off / denom
    a_sq = (1.0 - ecc * ecc) * (a * a * denom - h_off * h_off) / (denom * denom)
    if a_sq <= 0.0:
        raise EmptyIntersectionError("hyperplane cut misses the bisector sheet")
    a_new = math.sqrt(a_sq)
    b_new = math.sqrt(abs(a_sq * denom))
    center = conic.center + h_off * hp + t0 * new_axis
    out = ConicSection(kind, center, new_axis, a_new, b_new, e_new,
                       hp=conic.hp + [hp], ball_hi=conic.ball_hi,
                       ball_lo=conic.ball_lo)
    if kind == "hyperbola":
        out = _orient_hyperbola_sheet(out, tol)
    return out


def _any_unit_not_parallel(v):
    k = int(np.argmin(np.abs(v)))
    e = np.zeros_like(v)
    e[k] = 1.0
    return e


# ---------------------------------------------------------------------------
# planar parametrizations


@dataclass
class ConicPath:
    """A planar section of a ConicSection, spanned by (axis, u).

    point(beta) walks the curve:
      hyperbola: c + a sec(beta) v + b tan(beta) u   on beta in (-pi/2, pi/2)
      ellipse:   c + a cos(beta) v + b sin(beta) u
      parabola:  vhat + c_tilde beta^2 v + 2 c_tilde beta u
    """

    conic: ConicSection
    u: np.ndarray

    def point(self, beta):
        c = self.conic
        if c.kind == "hyperbola":
            sec = 1.0 / math.cos(beta)
            return c.center + c.a * sec * c.axis + c.b * math.tan(beta) * self.u
        if c.kind == "ellipse":
            return c.center + c.a * math.cos(beta) * c.axis + c.b * math.sin(beta) * self.u
        return c.center + c.c_tilde * beta * beta * c.axis + 2.0 * c.c_tilde * beta * self.u

    def locate(self, x, tol=DEFAULT_TOL):
        """Parameter beta with point(beta) = x, for x on the curve."""
        c = self.conic
        d = np.asarray(x, dtype=float) - c.center
        tv = float(d @ c.axis)
        tu = float(d @ self.u)
        if c.kind == "hyperbola":
            sec = tv / c.a
            if sec < 1.0 - 1e-6:
                raise GeometryError("point is not on the parametrized sheet")
            return math.atan(tu / c.b)
        if c.kind == "ellipse":
            return math.atan2(tu / c.b, tv / c.a)
        return tu / (2.0 * c.c_tilde)


def parametrize_2d(conic, u, tol=DEFAULT_TOL):
    """Planar section of `conic` through its axis and the unit vector u.

    u must be orthogonal to the axis and to every folded hyperplane
    normal, so the section stays inside all bisectors the conic encodes.
    """
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-8:
        raise ValueError("u must be a unit vector")
    for w in conic.fixed_directions():
        if abs(float(u @ w)) > 1e-7:
            raise ValueError("u must be orthogonal to the conic axis and cut normals")
    return ConicPath(conic, u)


# ---------------------------------------------------------------------------
# scalar breakpoint equations


@dataclass(frozen=True)
class TrigRoot:
    beta: float
    valid: bool          # False when the root falls on the sec <= 0 sheet
    sec: float = 0.0
    tan: float = 0.0


def _stable_quadratic(a, b, c, tol=DEFAULT_TOL):
    """Real roots of a t^2 + b t + c = 0, near-tangent discriminants clamped."""
    scale = max(abs(a), abs(b), abs(c), 1.0)
    if abs(a) <= tol.zero_direction * scale:
        if abs(b) <= tol.zero_direction * scale:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if disc > -tol.discriminant * scale * scale:
            # grazing contact: the double root, not the c/q companion
            # (which is meaningless once the discriminant is clamped)
            return [-b / (2.0 * a)]
        return []
    sq = math.sqrt(disc)
    q = -(b + math.copysign(sq, b)) / 2.0
    roots = [q / a]
    if q != 0.0:
        roots.append(c / q)
    elif sq > 0.0:
        roots.append(-q / a)
    return sorted(set(roots))


def solve_sec_tan(A, B, C, tol=DEFAULT_TOL):
    """Roots of A sec(beta) + B tan(beta) = C on the sec > 0 branch.

    Returns TrigRoots for every solution of the squared system; roots
    whose consistent secant is negative belong to the opposite sheet and
    are flagged invalid (beta = nan).
    """
    scale = max(abs(A), abs(B), abs(C), 1.0)
    out = []
    if abs(A) <= tol.zero_direction * scale:
        if abs(B) <= tol.zero_direction * scale:
            return []
        t = C / B
        sec = math.sqrt(1.0 + t * t)
        out.append(TrigRoot(math.atan(t), True, sec, t))
        return out
    # squared: (A^2 - B^2) t^2 + 2 B C t + (A^2 - C^2) = 0, sec = (C - B t)/A
    for t in _stable_quadratic(A * A - B * B, 2.0 * B * C, A * A - C * C, tol):
        sec = (C - B * t) / A
        # discard artifacts of squaring
        if abs(sec * sec - (1.0 + t * t)) > 1e-6 * (1.0 + t * t):
            continue
        if sec > 0.0:
            out.append(TrigRoot(math.atan(t), True, sec, t))
        else:
            out.append(TrigRoot(math.nan, False, sec, t))
    return out


def solve_cos_sin(A, B, C, tol=DEFAULT_TOL):
    """Roots of A cos(beta) + B sin(beta) = C in (-pi, pi]."""
    R = math.hypot(A, B)
    scale = max(R, abs(C), 1.0)
    if R <= tol.zero_direction * scale:
        return []
    ratio = C / R
    if abs(ratio) > 1.0:
        if abs(ratio) - 1.0 > tol.discriminant:
            return []
        ratio = math.copysign(1.0, ratio)
    phi = math.atan2(B, A)
    delta = math.acos(ratio)
    betas = {_wrap_angle(phi + delta), _wrap_angle(phi - delta)}
    return [TrigRoot(b, True, 0.0, 0.0) for b in sorted(betas)]


def solve_parabola_quadratic(A, B, C, tol=DEFAULT_TOL):
    """Real roots of A beta^2 + B beta = C, ascending."""
    return [TrigRoot(t, True) for t in _stable_quadratic(A, B, -C, tol)]


def _wrap_angle(b):
    w = math.remainder(b, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w
