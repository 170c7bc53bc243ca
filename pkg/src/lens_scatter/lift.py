"""Lifts of plane curves to the unit-tangent and line bundles over the disk.

A point of the projectivized bundle is a base point plus a tangent *line*,
stored as a continuous real-valued lift whose representative in ``[0, pi)``
is derived (never the reverse: this is what prevents mod-pi branch bugs).
All bundle-side distances use the flat background structure regardless of
any optical metric being traced: the base is Euclidean, parallel transport
is trivial, and the product (Sasakian) metric on base x fiber makes a
"linear" curve literally a straight segment in ``(x, y, lift)`` coordinates.

Distances between bundle points: ``d_h`` is the base distance, ``d_v`` the
angle between the lines after (trivial) transport, in ``[0, pi/2]``, and
``d0 = max(d_h, d_v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import ImmersionError, ParametricCurve

TWO_PI = 2.0 * math.pi

# Injectivity radius of the flat unit disk: straight segments between any
# two points are unique, so the diameter bounds it.
FLAT_INJECTIVITY_RADIUS = 2.0


class TransportUndefinedError(ValueError):
    """Base points too far apart for a unique connecting segment."""


class AmbiguousFiberArcError(ValueError):
    """The two lines are perpendicular: no unique shorter rotation."""


@dataclass(frozen=True)
class ProjPoint:
    """Point of the projectivized bundle: base point and line-angle lift."""

    x: float
    y: float
    lift: float

    @property
    def line_angle(self) -> float:
        return self.lift % math.pi

    @property
    def base(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class DistComponents:
    d_h: float
    d_v: float
    d0: float


def line_angle_distance(a: float, b: float) -> float:
    """Distance between two line angles, pi-periodic, in [0, pi/2]."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def dist_components(p: ProjPoint, q: ProjPoint, *,
                    inj: float = FLAT_INJECTIVITY_RADIUS) -> DistComponents:
    """Horizontal, vertical, and max distance between bundle points."""
    d_h = math.hypot(q.x - p.x, q.y - p.y)
    if d_h >= inj:
        raise TransportUndefinedError(
            f"base distance {d_h:.3f} reaches the injectivity radius {inj}")
    d_v = line_angle_distance(p.line_angle, q.line_angle)
    return DistComponents(d_h, d_v, max(d_h, d_v))


def fiber_step(p: ProjPoint, q: ProjPoint) -> float:
    """Signed rotation through the shorter pi-periodic arc from p's line to q's."""
    return math.remainder(q.line_angle - p.line_angle, math.pi)


class MinimalLinearCurve:
    """Straight base segment with constant-rate rotation through the short arc.

    The total fiber rotation equals ``d_v(p, q)`` exactly; the endpoint
    lifts are anchored at ``p.lift`` (so ``point_at(1)`` reproduces ``q``'s
    line, possibly with a different lift representative).
    """

    def __init__(self, p: ProjPoint, q: ProjPoint, *,
                 inj: float = FLAT_INJECTIVITY_RADIUS):
        dc = dist_components(p, q, inj=inj)
        if abs(dc.d_v - 0.5 * math.pi) < 1e-12:
            raise AmbiguousFiberArcError(
                "perpendicular lines: both rotation arcs have length pi/2")
        self.p = p
        self.q = q
        self.delta = fiber_step(p, q)
        self.components = dc

    def point_at(self, t: float) -> ProjPoint:
        return ProjPoint(self.p.x + t * (self.q.x - self.p.x),
                         self.p.y + t * (self.q.y - self.p.y),
                         self.p.lift + t * self.delta)

    def points_at(self, ts) -> list[ProjPoint]:
        return [self.point_at(float(t)) for t in np.asarray(ts).ravel()]

    @property
    def vertical_length(self) -> float:
        return abs(self.delta)

    @property
    def start(self) -> ProjPoint:
        return self.point_at(0.0)

    @property
    def end(self) -> ProjPoint:
        return self.point_at(1.0)


def minimal_linear_curve(p: ProjPoint, q: ProjPoint, *,
                         inj: float = FLAT_INJECTIVITY_RADIUS) -> MinimalLinearCurve:
    return MinimalLinearCurve(p, q, inj=inj)


class LiftedCurve:
    """Curve in the unit tangent bundle: base samples plus a continuous
    direction-angle lift.  ``total_turn`` is the lift increment over one full
    period (2 pi times the turning number for closed curves)."""

    def __init__(self, t, points, theta, *, closed, total_turn, source=None):
        self.t = np.asarray(t, dtype=float)
        self.points = np.asarray(points, dtype=float)
        self.theta = np.asarray(theta, dtype=float)
        self.closed = bool(closed)
        self.total_turn = float(total_turn)
        self.source = source

    @property
    def turning_number(self) -> int:
        if not self.closed:
            raise ValueError("turning number needs a closed curve")
        w = self.total_turn / TWO_PI
        if abs(w - round(w)) > 1e-6:
            raise RuntimeError(f"total rotation {w:.6f} turns is not integral")
        return int(round(w))

    def theta_at(self, l: float) -> float:
        """Continuous lift at an arbitrary parameter, anchored at the nearest sample."""
        lw = l % 1.0
        m = len(self.t)
        if self.source is None:
            xp = np.concatenate([self.t, [1.0]])
            fp = np.concatenate([self.theta, [self.theta[0] + self.total_turn]])
            return float(np.interp(lw, xp, fp))
        i = min(int(round(lw * m)), m - 1)
        v = self.source.velocity(lw)
        raw = math.atan2(v[1], v[0])
        # The nearest sample pins the 2 pi branch of the analytic angle.
        return self.theta[i] + math.remainder(raw - self.theta[i], TWO_PI)

    def point_at(self, l: float) -> np.ndarray:
        lw = l % 1.0
        if self.source is None:
            xp = np.concatenate([self.t, [1.0]])
            wrap = np.vstack([self.points, self.points[:1]])
            return np.array([np.interp(lw, xp, wrap[:, 0]),
                             np.interp(lw, xp, wrap[:, 1])])
        return self.source.point(lw)


def unit_tangent_lift(curve, samples: int = 512) -> LiftedCurve:
    """Lift a curve to the unit tangent bundle along its normalized velocity.

    ``curve`` is a :class:`~lens_scatter.curves.ParametricCurve` or an
    ``(m, 2)`` array of closed-curve samples.  Fails if the speed vanishes
    (not an immersion) or if the sampling is too sparse for a continuous
    angle lift (consecutive directions must differ by well under pi/2).
    """
    if isinstance(curve, np.ndarray) or (not hasattr(curve, "velocity")):
        from .curves import from_samples

        curve = from_samples(np.asarray(curve, dtype=float))
    ts = np.linspace(0.0, 1.0, samples, endpoint=False)
    pts = curve.point(ts)
    vel = curve.velocity(ts)
    speed = np.hypot(vel[:, 0], vel[:, 1])
    if np.min(speed) < 1e-12:
        raise ImmersionError("curve speed vanishes: unit direction undefined")
    raw = np.arctan2(vel[:, 1], vel[:, 0])
    if curve.closed:
        raw_ext = np.concatenate([raw, raw[:1]])
        theta_ext = np.unwrap(raw_ext)
        steps = np.abs(np.diff(theta_ext))
        theta = theta_ext[:-1]
        total = theta_ext[-1] - theta_ext[0]
    else:
        theta = np.unwrap(raw)
        steps = np.abs(np.diff(theta))
        total = theta[-1] - theta[0]
    if steps.size and np.max(steps) > 0.5 * math.pi:
        raise ValueError("sampling too sparse for a continuous direction lift")
    return LiftedCurve(ts, pts, theta, closed=curve.closed, total_turn=total,
                       source=curve)


class ProjCurve:
    """Projectivized lift: same continuous lift, read as a line angle mod pi."""

    def __init__(self, lifted: LiftedCurve):
        self.lifted = lifted
        self.t = lifted.t
        self.points = lifted.points
        self.line_lift = lifted.theta
        self.closed = lifted.closed

    @property
    def line_winding(self) -> int:
        if not self.closed:
            raise ValueError("line winding needs a closed curve")
        w = self.lifted.total_turn / math.pi
        if abs(w - round(w)) > 1e-6:
            raise RuntimeError(f"line rotation {w:.6f} half-turns is not integral")
        return int(round(w))

    def line_lift_at(self, l: float) -> float:
        return self.lifted.theta_at(l)

    def proj_points(self) -> list[ProjPoint]:
        return [ProjPoint(p[0], p[1], c)
                for p, c in zip(self.points, self.line_lift)]


def projectivize(lifted: LiftedCurve) -> ProjCurve:
    """Quotient a tangent-bundle curve by the opposite-vector identification.

    A closed curve whose direction winds ``w`` times becomes a closed curve
    in the line bundle winding ``2 w`` times along the fiber (the fiber
    halves from 2 pi to pi).
    """
    return ProjCurve(lifted)


def vertical_length(obj) -> float:
    """Total fiber rotation of a curve in the line bundle.

    Accepts a minimal linear curve (giving exactly its ``d_v``), a
    :class:`ProjCurve` (including the wrap-around increment when closed) or
    a list of :class:`ProjPoint` whose lifts are read as one continuous
    path.  Concatenation adds.
    """
    if isinstance(obj, MinimalLinearCurve):
        return obj.vertical_length
    if isinstance(obj, ProjCurve):
        total = float(np.sum(np.abs(np.diff(obj.line_lift))))
        if obj.closed:
            closing = (obj.line_lift[0] + obj.lifted.total_turn) - obj.line_lift[-1]
            total += abs(closing)
        return total
    pts = list(obj)
    return float(sum(abs(b.lift - a.lift) for a, b in zip(pts, pts[1:])))


class PLVertexPath:
    """Closed piecewise-linear knot: bundle vertices joined by minimal
    linear edges (adjacent vertices must admit them)."""

    def __init__(self, vertices, *, inj: float = FLAT_INJECTIVITY_RADIUS):
        self.vertices = list(vertices)
        if len(self.vertices) < 3:
            raise ValueError("need at least 3 vertices")
        self.edges = [MinimalLinearCurve(a, b, inj=inj)
                      for a, b in zip(self.vertices,
                                      self.vertices[1:] + self.vertices[:1])]
        self.deltas = [e.delta for e in self.edges]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def total_rotation(self) -> float:
        return float(sum(self.deltas))

    @property
    def contractible(self) -> bool:
        # pi_1 of the solid-torus line bundle is generated by the fiber;
        # the class is the total rotation in units of pi.
        return abs(self.total_rotation) < 1e-9

    def lift_at_vertex(self, k: int) -> float:
        return self.vertices[0].lift + sum(self.deltas[:k])

    def point_at(self, u: float) -> ProjPoint:
        u = u % 1.0
        scaled = u * self.n
        k = min(int(scaled), self.n - 1)
        frac = scaled - k
        base = self.edges[k].point_at(frac)
        # Re-anchor the lift so it is continuous around the whole loop.
        return ProjPoint(base.x, base.y, self.lift_at_vertex(k) + frac * self.deltas[k])

    def sample(self, m: int) -> list[ProjPoint]:
        return [self.point_at(i / m) for i in range(m)]


def _flat_embedding(p: ProjPoint, q: ProjPoint, r: ProjPoint) -> np.ndarray:
    """Consistent (x, y, lift) coordinates for a small bundle triangle."""
    cp = 0.0
    cq = fiber_step(p, q)
    cr = fiber_step(p, r)
    # The three pairwise short arcs must agree as one flat configuration.
    if abs(math.remainder(cr - cq, math.pi) - fiber_step(q, r)) > 1e-9:
        raise AmbiguousFiberArcError("fiber arcs of the triple wrap inconsistently")
    return np.array([[p.x, p.y, cp], [q.x, q.y, cq], [r.x, r.y, cr]])


def triangle_angle_sum(p: ProjPoint, q: ProjPoint, r: ProjPoint) -> float:
    """Sum of the angles a bundle triangle makes at its vertices.

    The sides are the minimal linear curves between the vertices, which in
    the flat product structure are straight segments of ``(x, y, lift)``
    space, so the sum tends to pi as the triple shrinks.
    """
    verts = _flat_embedding(p, q, r)
    total = 0.0
    for i in range(3):
        a = verts[(i + 1) % 3] - verts[i]
        b = verts[(i + 2) % 3] - verts[i]
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            raise ValueError("degenerate triangle: coincident vertices")
        total += math.acos(max(-1.0, min(1.0, float(np.dot(a, b)) / (na * nb))))
    return total
