"""Geometry of unit spheres: circles, arcs, rotations, tolerance policy.

Every ball in this package has radius exactly 1, so sphere/sphere and
circle/ball relations have closed forms in the center distances alone.
No function here compares floats directly; everything routes through a
Tolerance instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """A geometric construction was degenerate or out of range."""


@dataclass(frozen=True)
class Tolerance:
    """Numeric thresholds for incidence and feature-size decisions.

    eps_geom bounds coincidence/incidence tests; eps_feature is the smallest
    feature size (arc length, vertex separation) boundary computations accept
    without raising a degeneracy.
    """

    eps_geom: float = 1e-9
    eps_feature: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_geom < self.eps_feature < 1.0):
            raise ValueError("need 0 < eps_geom < eps_feature < 1")


def vec(x, y=None, z=None) -> np.ndarray:
    if y is None:
        a = np.asarray(x, dtype=float)
        if a.shape != (3,):
            raise GeometryError("expected a 3-vector")
        return a
    return np.array([x, y, z], dtype=float)


def norm(v) -> float:
    return float(np.linalg.norm(v))


def unit(v) -> np.ndarray:
    n = norm(v)
    if n == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return np.asarray(v, dtype=float) / n


def wrap_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def perpendicular_unit(n: np.ndarray) -> np.ndarray:
    """A deterministic unit vector orthogonal to n (n need not be unit)."""
    n = np.asarray(n, dtype=float)
    k = int(np.argmin(np.abs(n)))
    e = np.zeros(3)
    e[k] = 1.0
    w = e - (e @ n) / (n @ n) * n
    return unit(w)


@dataclass(frozen=True)
class Circle3:
    """A circle in space: center, radius and unit plane normal.

    Angles on the circle are measured counterclockwise about the normal in
    the frame returned by ``frame()``.
    """

    center: tuple[float, float, float]
    radius: float
    normal: tuple[float, float, float]

    @staticmethod
    def make(center, radius: float, normal) -> "Circle3":
        nr = unit(normal)
        if radius <= 0.0:
            raise GeometryError("circle radius must be positive")
        c = vec(center)
        return Circle3(tuple(c), float(radius), tuple(nr))

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center)

    @property
    def n(self) -> np.ndarray:
        return np.asarray(self.normal)

    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        u = perpendicular_unit(self.n)
        v = np.cross(self.n, u)
        return u, v

    def point_at(self, theta: float) -> np.ndarray:
        u, v = self.frame()
        return self.c + self.radius * (math.cos(theta) * u + math.sin(theta) * v)

    def angle_of(self, p) -> float:
        u, v = self.frame()
        d = vec(p) - self.c
        return wrap_angle(math.atan2(float(d @ v), float(d @ u)))


@dataclass(frozen=True)
class Arc3:
    """Arc of a circle from start_angle sweeping CCW by sweep radians.

    sweep == 2*pi together with full=True denotes the whole circle.
    """

    circle: Circle3
    start_angle: float
    sweep: float
    full: bool = False

    def length(self) -> float:
        return self.circle.radius * self.sweep

    def point_at_fraction(self, t: float) -> np.ndarray:
        return self.circle.point_at(wrap_angle(self.start_angle + t * self.sweep))

    def start_point(self) -> np.ndarray:
        return self.circle.point_at(self.start_angle)

    def end_point(self) -> np.ndarray:
        return self.circle.point_at(wrap_angle(self.start_angle + self.sweep))


@dataclass(frozen=True)
class Rotation3:
    """Rigid rotation about the line through axis_point with direction axis_dir."""

    axis_point: tuple[float, float, float]
    axis_dir: tuple[float, float, float]
    angle: float

    @staticmethod
    def make(axis_point, axis_dir, angle: float) -> "Rotation3":
        return Rotation3(tuple(vec(axis_point)), tuple(unit(axis_dir)), float(angle))

    @staticmethod
    def through_points(a, b, angle: float) -> "Rotation3":
        a = vec(a)
        b = vec(b)
        return Rotation3.make(a, b - a, angle)


def rotate(p, rot: Rotation3) -> np.ndarray:
    """Rotate point p by rot (Rodrigues formula)."""
    k = np.asarray(rot.axis_dir)
    q = vec(p) - np.asarray(rot.axis_point)
    c, s = math.cos(rot.angle), math.sin(rot.angle)
    out = q * c + np.cross(k, q) * s + k * (k @ q) * (1.0 - c)
    return out + np.asarray(rot.axis_point)


@dataclass(frozen=True)
class SphereSphereResult:
    kind: str  # "circle" | "point" | "empty"
    circle: Circle3 | None = None
    point: tuple[float, float, float] | None = None


def sphere_sphere_circle(c1, c2, tol: Tolerance = Tolerance()) -> SphereSphereResult:
    """Intersection of the unit spheres about c1 and c2.

    Distance d < 2 gives a circle of radius sqrt(1 - d^2/4) in the bisector
    plane, d == 2 a tangency point, d > 2 nothing.  Coincident centers are an
    error: they cannot occur in a reduced center set.
    """
    c1 = vec(c1)
    c2 = vec(c2)
    d = norm(c2 - c1)
    if d <= tol.eps_geom:
        raise GeometryError("coincident sphere centers")
    if d > 2.0 + tol.eps_geom:
        return SphereSphereResult("empty")
    if d >= 2.0 - tol.eps_geom:
        return SphereSphereResult("point", point=tuple((c1 + c2) / 2.0))
    r = math.sqrt(max(0.0, 1.0 - 0.25 * d * d))
    circle = Circle3.make((c1 + c2) / 2.0, r, (c2 - c1) / d)
    return SphereSphereResult("circle", circle=circle)


@dataclass(frozen=True)
class TriplePointResult:
    kind: str  # "pair" | "double" | "none"
    points: tuple[tuple[float, float, float], ...] = ()


def circumcircle3(c1, c2, c3, tol: Tolerance = Tolerance()):
    """Circumcenter and circumradius of three non-collinear points."""
    c1, c2, c3 = vec(c1), vec(c2), vec(c3)
    a = c2 - c1
    b = c3 - c1
    axb = np.cross(a, b)
    n2 = float(axb @ axb)
    if math.sqrt(n2) <= tol.eps_geom * max(1.0, norm(a) * norm(b)):
        raise GeometryError("collinear centers")
    # standard circumcenter formula relative to c1
    p = c1 + (np.cross(axb, a) * float(b @ b) + np.cross(b, axb) * float(a @ a)) / (2.0 * n2)
    return p, norm(p - c1), unit(axb)


def triple_sphere_points(c1, c2, c3, tol: Tolerance = Tolerance()) -> TriplePointResult:
    """Common points of three unit spheres.

    Returns the two solutions mirrored across the plane of the centers; the
    first lies on the positive side of normal (c2-c1) x (c3-c1).  The
    circumradius of the centers decides existence: < 1 a pair, == 1 a double
    point, > 1 none.
    """
    p, rc, n = circumcircle3(c1, c2, c3, tol)
    h2 = 1.0 - rc * rc
    if h2 < -tol.eps_geom:
        return TriplePointResult("none")
    if h2 <= tol.eps_geom:
        return TriplePointResult("double", (tuple(p),))
    h = math.sqrt(h2)
    return TriplePointResult("pair", (tuple(p + h * n), tuple(p - h * n)))


@dataclass(frozen=True)
class ClipResult:
    """Angular solution set of |circle(theta) - center| <= 1.

    kind "arc" means theta in [start, start+sweep] taken mod 2*pi.
    """

    kind: str  # "full" | "empty" | "arc"
    start: float = 0.0
    sweep: float = 0.0


def circle_ball_clip(circle: Circle3, center, tol: Tolerance = Tolerance()) -> ClipResult:
    """Clip a circle against the unit ball about center.

    The squared distance from circle(theta) to the ball center is
    A + B cos(theta) + C sin(theta); the inequality <= 1 solves to at most
    one angular interval.
    """
    x = vec(center)
    u, v = circle.frame()
    w = circle.c - x
    r = circle.radius
    a = float(w @ w) + r * r
    bb = 2.0 * r * float(w @ u)
    cc = 2.0 * r * float(w @ v)
    m = math.hypot(bb, cc)
    if m <= tol.eps_geom * tol.eps_geom:
        # ball center on the circle axis: all points equidistant
        return ClipResult("full") if a <= 1.0 else ClipResult("empty")
    t = (1.0 - a) / m
    if t >= 1.0:
        return ClipResult("full")
    if t <= -1.0:
        return ClipResult("empty")
    phi = math.atan2(cc, bb)
    alpha = math.acos(t)
    # cos(theta - phi) <= t  <=>  theta - phi in [alpha, 2*pi - alpha]
    return ClipResult("arc", start=wrap_angle(phi + alpha), sweep=TWO_PI - 2.0 * alpha)


def min_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Smallest ball containing the points (Welzl, deterministic order)."""
    pts = [vec(p) for p in points]
    if not pts:
        raise GeometryError("no points")

    def ball_of(basis):
        if not basis:
            return np.zeros(3), -1.0
        if len(basis) == 1:
            return basis[0], 0.0
        if len(basis) == 2:
            c = (basis[0] + basis[1]) / 2.0
            return c, norm(basis[0] - c)
        if len(basis) == 3:
            a, b, d = basis
            try:
                c, r, _ = circumcircle3(a, b, d)
            except GeometryError:
                # collinear: use the two farthest apart
                pairs = [(a, b), (a, d), (b, d)]
                far = max(pairs, key=lambda q: norm(q[0] - q[1]))
                c = (far[0] + far[1]) / 2.0
                return c, norm(far[0] - c)
            return c, r
        # four points: solve |c-p_i|^2 equal -> linear system
        a = basis[0]
        rows = np.array([2.0 * (p - a) for p in basis[1:]])
        rhs = np.array([float(p @ p - a @ a) for p in basis[1:]])
        try:
            c = np.linalg.solve(rows, rhs)
        except np.linalg.LinAlgError:
            c, _ = ball_of(basis[:3])
            return c, max(norm(p - c) for p in basis)
        return c, norm(basis[0] - c)

    def welzl(idx, basis):
        if not idx or len(basis) == 4:
            return ball_of(basis)
        p = pts[idx[0]]
        c, r = welzl(idx[1:], basis)
        if r >= 0.0 and norm(p - c) <= r * (1.0 + 1e-12) + 1e-15:
            return c, r
        return welzl(idx[1:], basis + [p])

    c, r = welzl(list(range(len(pts))), [])
    # one tightening pass guards against float drift in the recursion
    r = max(norm(p - c) for p in pts)
    return c, r
