"""Crossings, signs, types, and signed-count invariants of framed closed
curves in the line bundle over the disk, with the piecewise-linear
approximation machinery.

A *framed loop* couples a closed base curve in the plane with a continuous
lift of a direction-angle field along it (the frame).  For the main
pipeline the frame is the normalized velocity of the base curve; synthetic
frames and piecewise-linear knots go through the same interface.

A crossing is an unordered parameter pair ``(l, l')`` with equal base
points.  Its sign compares the orientation of the frame pair with that of
the velocity pair; its type is the fiber class of the loop obtained by
closing the ``[l, l']`` arc with the shorter fiber arc between the two
frame vectors, measured as total line rotation in units of pi (an even
integer on the disk, 0 being the trivial class).  The table ``g -> W_g``
counts crossings of each nonzero type with signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curves import ParametricCurve, TrigCurve
from .lift import (FLAT_INJECTIVITY_RADIUS, MinimalLinearCurve, PLVertexPath,
                   ProjPoint, dist_components, unit_tangent_lift)

TWO_PI = 2.0 * math.pi


class SelfTangencyError(ValueError):
    """Two branches meet with parallel directions: not a regular crossing."""


class DegenerateCrossingError(ValueError):
    """Crossing refinement failed or the frame pair is degenerate."""


class NonIntegralClassError(RuntimeError):
    """Smoothed-loop rotation is not close to a whole number of half-turns."""


# ---------------------------------------------------------------------------
# framed loops


class TangentLoop:
    """Framed loop whose frame is the unit tangent of its own base curve."""

    def __init__(self, curve: ParametricCurve, samples: int = 512):
        self.curve = curve
        self.samples = samples
        self.lifted = unit_tangent_lift(curve, samples)
        self.period_shift = self.lifted.total_turn
        self.smooth = True

    def base_points(self, ts) -> np.ndarray:
        return self.curve.point(np.mod(ts, 1.0))

    def base_point(self, l: float) -> np.ndarray:
        return self.curve.point(l % 1.0)

    def base_velocity(self, l: float) -> np.ndarray:
        return self.curve.velocity(l % 1.0)

    def frame_angle(self, l: float) -> float:
        return self.lifted.theta_at(l)

    def line_winding(self) -> int:
        w = self.period_shift / math.pi
        if abs(w - round(w)) > 1e-6:
            raise NonIntegralClassError(f"line rotation {w:.6f} not integral")
        return int(round(w))


class CallableFramedLoop:
    """Framed loop from explicit callables (base, velocity, frame lift).

    ``chi_fn`` must be a continuous real lift over ``[0, 1]``; its increment
    over the period is the fiber class of the loop times pi.
    """

    def __init__(self, point_fn, velocity_fn, chi_fn, *, samples: int = 512,
                 smooth: bool = True):
        self._point = point_fn
        self._velocity = velocity_fn
        self._chi = chi_fn
        self.samples = samples
        self.smooth = smooth
        self.period_shift = float(chi_fn(1.0) - chi_fn(0.0))

    def base_points(self, ts) -> np.ndarray:
        return np.array([self._point(float(t) % 1.0) for t in np.asarray(ts).ravel()])

    def base_point(self, l: float) -> np.ndarray:
        return np.asarray(self._point(l % 1.0), dtype=float)

    def base_velocity(self, l: float) -> np.ndarray:
        return np.asarray(self._velocity(l % 1.0), dtype=float)

    def frame_angle(self, l: float) -> float:
        lw = l % 1.0
        return float(self._chi(lw))

    def line_winding(self) -> int:
        w = self.period_shift / math.pi
        if abs(w - round(w)) > 1e-6:
            raise NonIntegralClassError(f"line rotation {w:.6f} not integral")
        return int(round(w))


class PLLoop:
    """Framed loop view of a piecewise-linear knot (exact crossing search)."""

    def __init__(self, path: PLVertexPath):
        self.path = path
        self.samples = 8 * path.n
        self.period_shift = path.total_rotation
        self.smooth = False

    def base_points(self, ts) -> np.ndarray:
        return np.array([self.path.point_at(float(t)).base for t in np.asarray(ts).ravel()])

    def base_point(self, l: float) -> np.ndarray:
        return self.path.point_at(l).base

    def base_velocity(self, l: float) -> np.ndarray:
        k = min(int((l % 1.0) * self.path.n), self.path.n - 1)
        e = self.path.edges[k]
        return np.array([e.q.x - e.p.x, e.q.y - e.p.y])

    def frame_angle(self, l: float) -> float:
        return self.path.point_at(l).lift

    def line_winding(self) -> int:
        w = self.period_shift / math.pi
        if abs(w - round(w)) > 1e-6:
            raise NonIntegralClassError(f"line rotation {w:.6f} not integral")
        return int(round(w))


def as_framed_loop(obj, samples: int | None = None):
    if isinstance(obj, (TangentLoop, CallableFramedLoop, PLLoop)):
        return obj
    if isinstance(obj, PLVertexPath):
        return PLLoop(obj)
    if isinstance(obj, ParametricCurve):
        return TangentLoop(obj, samples or 512)
    from .curves import from_samples

    return TangentLoop(from_samples(np.asarray(obj, dtype=float)), samples or 512)


# ---------------------------------------------------------------------------
# crossings


@dataclass
class Crossing:
    """Unordered double point: canonical parameters l < l', sign and type."""

    l: float
    l_prime: float
    point: tuple[float, float]
    sign: int | None = None
    ctype: int | None = None


@dataclass(frozen=True)
class InvariantTable:
    """Signed crossing counts per nonzero type; absent keys count zero."""

    entries: dict

    @classmethod
    def from_crossings(cls, crossings) -> "InvariantTable":
        tally: dict[int, int] = {}
        for c in crossings:
            if c.ctype is None or c.sign is None or c.ctype == 0:
                continue
            tally[c.ctype] = tally.get(c.ctype, 0) + c.sign
        return cls({g: w for g, w in sorted(tally.items()) if w != 0})

    def get(self, g: int) -> int:
        return self.entries.get(g, 0)

    def __getitem__(self, g: int) -> int:
        return self.entries[g]

    def __eq__(self, other):
        if isinstance(other, InvariantTable):
            return self.entries == other.entries
        return self.entries == other

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))


@dataclass(frozen=True)
class Certificate:
    kind: str  # "non_contractible" | "nonzero_invariant" | "failure"
    g: int | None = None
    line_winding: int = 0


@dataclass
class LoopAnalysis:
    line_winding: int
    contractible: bool
    crossings: list
    table: InvariantTable | None
    certificate: Certificate


def _segment_params(p1, p2, p3, p4, eps: float = 1e-9):
    """Intersection parameters of two segments, or None."""
    d1 = p2 - p1
    d2 = p4 - p3
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < 1e-15 * (np.hypot(*d1) * np.hypot(*d2) + 1e-300):
        return None
    w = p3 - p1
    t = (w[0] * d2[1] - w[1] * d2[0]) / denom
    u = (w[0] * d1[1] - w[1] * d1[0]) / denom
    if -eps <= t <= 1.0 + eps and -eps <= u <= 1.0 + eps:
        return t, u
    return None


def _polish_crossing(loop, l: float, lp: float, tol: float, angular_tol: float):
    """Newton-refine base_point(l) == base_point(l'), then check transversality."""
    for _ in range(30):
        f = loop.base_point(l) - loop.base_point(lp)
        if math.hypot(f[0], f[1]) < 1e-13:
            break
        v1 = loop.base_velocity(l)
        v2 = loop.base_velocity(lp)
        det = -v1[0] * v2[1] + v1[1] * v2[0]
        if abs(det) < 1e-14:
            raise SelfTangencyError("parallel branches at a coincident point")
        l -= (-f[0] * v2[1] + f[1] * v2[0]) / det
        lp -= (v1[0] * f[1] - v1[1] * f[0]) / det
    f = loop.base_point(l) - loop.base_point(lp)
    if math.hypot(f[0], f[1]) > tol:
        raise DegenerateCrossingError("crossing refinement did not converge")
    v1 = loop.base_velocity(l)
    v2 = loop.base_velocity(lp)
    s = abs(v1[0] * v2[1] - v1[1] * v2[0]) / (math.hypot(*v1) * math.hypot(*v2))
    if s < angular_tol:
        raise SelfTangencyError("branches meet tangentially")
    return l % 1.0, lp % 1.0


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def _dedup(raw, merge_tol: float):
    out: list[Crossing] = []
    for l, lp, pt in raw:
        lo, hi = (l, lp) if l <= lp else (lp, l)
        for c in out:
            if ((_circ_dist(c.l, lo) < merge_tol and _circ_dist(c.l_prime, hi) < merge_tol)
                    or (_circ_dist(c.l, hi) < merge_tol and _circ_dist(c.l_prime, lo) < merge_tol)):
                break
        else:
            out.append(Crossing(lo, hi, (pt[0], pt[1])))
    out.sort(key=lambda c: (c.l, c.l_prime))
    return out


def find_crossings(loop, tol: float = 1e-9, *, samples: int | None = None,
                   angular_tol: float = 1e-6) -> list[Crossing]:
    """All double points of the base curve, signs and types unfilled.

    Candidate pairs come from segment intersections of a dense polyline
    (pruned with a KD-tree) and are Newton-polished on the smooth curve; a
    triple point shows up as its three parameter pairs.  Raises
    :class:`SelfTangencyError` when two branches meet with parallel
    directions.
    """
    loop = as_framed_loop(loop, samples)
    if isinstance(loop, PLLoop):
        return _pl_crossings(loop, angular_tol)
    m = samples or loop.samples
    ts = np.arange(m) / m
    pts = loop.base_points(ts)
    nxt = np.roll(pts, -1, axis=0)
    mids = 0.5 * (pts + nxt)
    seg_len = np.hypot(*(nxt - pts).T)
    tree = cKDTree(mids)
    pairs = tree.query_pairs(float(np.max(seg_len)) * 1.000001, output_type="ndarray")
    raw = []
    for i, j in pairs:
        gap = min((j - i) % m, (i - j) % m)
        if gap <= 1:
            continue
        hit = _segment_params(pts[i], nxt[i], pts[j], nxt[j])
        if hit is None:
            continue
        t, u = hit
        if loop.smooth:
            l, lp = _polish_crossing(loop, (i + t) / m, (j + u) / m, tol, angular_tol)
        else:
            l, lp = ((i + t) / m) % 1.0, ((j + u) / m) % 1.0
        raw.append((l, lp, loop.base_point(l)))
    return _dedup(raw, merge_tol=max(2.0 / m, 1e-5))


def _pl_crossings(loop: PLLoop, angular_tol: float) -> list[Crossing]:
    path = loop.path
    n = path.n
    base = [v.base for v in path.vertices]
    raw = []
    for j in range(n):
        a1, b1 = base[j], base[(j + 1) % n]
        for k in range(j + 1, n):
            if k == j or (k - j) % n == 1 or (j - k) % n == 1:
                continue
            a2, b2 = base[k], base[(k + 1) % n]
            # Negative eps keeps hits strictly interior: a vertex sitting on
            # an edge is a singular configuration, not a crossing.
            hit = _segment_params(np.asarray(a1), np.asarray(b1),
                                  np.asarray(a2), np.asarray(b2), eps=-1e-9)
            if hit is None:
                continue
            t, u = hit
            l, lp = (j + t) / n, (k + u) / n
            d1 = np.asarray(b1) - np.asarray(a1)
            d2 = np.asarray(b2) - np.asarray(a2)
            s = abs(d1[0] * d2[1] - d1[1] * d2[0]) / (np.hypot(*d1) * np.hypot(*d2))
            if s < angular_tol:
                raise SelfTangencyError("PL edges cross tangentially")
            raw.append((l, lp, loop.base_point(l)))
    return _dedup(raw, merge_tol=1e-7)


def crossing_sign(crossing: Crossing, loop, *, angular_tol: float = 1e-6) -> int:
    """+1 when the frame pair and the velocity pair agree in orientation."""
    loop = as_framed_loop(loop)
    dchi = loop.frame_angle(crossing.l_prime) - loop.frame_angle(crossing.l)
    s1 = math.sin(dchi)
    v1 = loop.base_velocity(crossing.l)
    v2 = loop.base_velocity(crossing.l_prime)
    s2 = (v1[0] * v2[1] - v1[1] * v2[0]) / (math.hypot(*v1) * math.hypot(*v2))
    if abs(s1) < angular_tol:
        raise DegenerateCrossingError("frame vectors parallel at the crossing")
    if abs(s2) < angular_tol:
        raise SelfTangencyError("velocity vectors parallel at the crossing")
    return 1 if s1 * s2 > 0.0 else -1


def crossing_type(crossing: Crossing, loop, *, which_arc: int = 1,
                  residual_tol: float = 0.05) -> int:
    """Fiber class of the smoothed loop at a crossing, as a whole number.

    Closing the lift arc from ``l`` to ``l'`` with the reversed shorter
    fiber arc gives a loop whose total line rotation is an even multiple of
    pi; the type is that multiple's absolute value.  ``which_arc=2`` closes
    the complementary arc instead; for loops whose frame closes up (zero
    period shift, the domain of the signed-count table) both arcs land in
    the same class.
    """
    loop = as_framed_loop(loop)
    chi_l = loop.frame_angle(crossing.l)
    chi_lp = loop.frame_angle(crossing.l_prime)
    fiber = math.remainder(chi_lp - chi_l, TWO_PI)
    if which_arc == 1:
        total = (chi_lp - chi_l) - fiber
    elif which_arc == 2:
        total = fiber + (chi_l + loop.period_shift - chi_lp)
    else:
        raise ValueError("which_arc must be 1 or 2")
    half_turns = total / math.pi
    k = round(half_turns)
    if abs(half_turns - k) > residual_tol:
        raise NonIntegralClassError(
            f"smoothed rotation {half_turns:.4f} half-turns is not integral")
    return abs(int(k))


def first_return_crossing(crossings) -> Crossing:
    """The crossing closing the earliest self-intersecting initial arc."""
    if not crossings:
        raise ValueError("no crossings")
    return min(crossings, key=lambda c: max(c.l, c.l_prime))


def analyze_loop(loop, *, samples: int | None = None, tol: float = 1e-9) -> LoopAnalysis:
    """Full pipeline: winding, crossings with signs/types, table, certificate."""
    loop = as_framed_loop(loop, samples)
    lw = loop.line_winding()
    crossings = find_crossings(loop, tol, samples=samples)
    for c in crossings:
        c.sign = crossing_sign(c, loop)
        c.ctype = crossing_type(c, loop)
    contractible = lw == 0
    table = InvariantTable.from_crossings(crossings) if contractible else None
    if not contractible:
        cert = Certificate("non_contractible", None, lw)
    elif crossings:
        g = first_return_crossing(crossings).ctype
        cert = (Certificate("nonzero_invariant", g, lw) if g and g > 0
                else Certificate("failure", None, lw))
    else:
        cert = Certificate("failure", None, lw)
    return LoopAnalysis(lw, contractible, crossings, table, cert)


def w_invariant(curve, *, samples: int | None = None) -> InvariantTable:
    """Signed crossing counts per nonzero type of the projectivized tangent lift.

    Defined for curves whose lift is contractible (line winding zero); a
    non-contractible lift yields an empty table (the nontriviality
    certificate then short-circuits through the winding instead).
    """
    analysis = analyze_loop(curve, samples=samples)
    return analysis.table if analysis.table is not None else InvariantTable({})


def certify_nontrivial(curve, *, samples: int | None = None) -> Certificate:
    """Nontriviality certificate for the projectivized tangent lift."""
    return analyze_loop(curve, samples=samples).certificate


# ---------------------------------------------------------------------------
# piecewise-linear machinery


@dataclass(frozen=True)
class SingularityReport:
    kind: str  # "cusp" | "self_tangency" | "transverse"
    vertex: int
    edge: int


@dataclass(frozen=True)
class PLMembership:
    member: bool
    failed_condition: int | None
    detail: str


def pl_validate(vertices, n: int, eps: float, *,
                inj: float = FLAT_INJECTIVITY_RADIUS) -> PLMembership:
    """Membership test for the class of contractible PL knots with n vertices,
    adjacent gaps below eps, and minimal-linear edges.

    Conditions: (1) contractible, (2) all adjacent ``d0`` gaps below
    ``eps``, (3) edges are the minimal linear curves (automatic for vertex
    input once the gaps admit them).  Reports the first violated condition.
    """
    if n < 4:
        raise ValueError("need n >= 4 vertices")
    if not (0.0 < eps < min(inj, 0.5 * math.pi)):
        raise ValueError("eps must lie in (0, min(inj, pi/2))")
    vertices = list(vertices)
    if len(vertices) != n:
        raise ValueError(f"expected {n} vertices, got {len(vertices)}")
    for k in range(n):
        dc = dist_components(vertices[k], vertices[(k + 1) % n], inj=inj)
        if dc.d0 >= eps:
            return PLMembership(False, 2,
                                f"gap d0={dc.d0:.4f} at vertex {k} reaches eps={eps}")
    path = PLVertexPath(vertices, inj=inj)
    if not path.contractible:
        return PLMembership(False, 1,
                            f"total rotation {path.total_rotation:.4f} rad is nonzero")
    return PLMembership(True, None, "member")


def _point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    d = b - a
    L2 = float(d @ d)
    if L2 == 0.0:
        return float(np.hypot(*(p - a)))
    t = max(0.0, min(1.0, float((p - a) @ d) / L2))
    return float(np.hypot(*(p - (a + t * d))))


def singularity_classify(pl_knot: PLVertexPath, vertex: int, edge: int, *,
                         tol: float = 1e-9, angular_tol: float = 1e-6) -> SingularityReport:
    """Classify a vertex-on-edge incidence of a PL knot's base projection.

    ``cusp`` when an edge incident to the vertex is tangent to the met
    edge; otherwise ``self_tangency`` when both incident edges leave on the
    same side of it, ``transverse`` when they straddle it.
    """
    n = pl_knot.n
    i, j = vertex % n, edge % n
    if j == i or j == (i - 1) % n:
        raise ValueError("edge is incident to the vertex: not a singularity")
    p = pl_knot.vertices[i].base
    a = pl_knot.vertices[j].base
    b = pl_knot.vertices[(j + 1) % n].base
    if _point_segment_distance(p, a, b) > max(tol, 1e-12):
        raise ValueError("vertex does not lie on the edge")
    d = b - a
    d = d / np.hypot(*d)
    prev = pl_knot.vertices[(i - 1) % n].base
    nxt = pl_knot.vertices[(i + 1) % n].base
    for other in (prev, nxt):
        e = other - p
        norm = np.hypot(*e)
        if norm < 1e-15:
            continue
        if abs(d[0] * e[1] - d[1] * e[0]) / norm < angular_tol:
            return SingularityReport("cusp", i, j)
    s_prev = d[0] * (prev - a)[1] - d[1] * (prev - a)[0]
    s_next = d[0] * (nxt - a)[1] - d[1] * (nxt - a)[0]
    if s_prev * s_next > 0.0:
        return SingularityReport("self_tangency", i, j)
    return SingularityReport("transverse", i, j)


def pl_refine_local(G, n: int, l: float, s: float, k: int, t_local: float) -> ProjPoint:
    """One segment of the straightening interpolation.

    For local time below ``l`` the point moves along the minimal linear
    curve from the segment's start vertex toward the point at parameter
    ``(k + l)/n``; past ``l`` it follows the original family.  ``l = 0``
    reproduces the family exactly and ``l = 1`` yields the PL knot through
    the ``n`` sample vertices.
    """
    if not 0.0 <= t_local <= 1.0:
        raise ValueError("local parameter must lie in [0, 1]")
    if l > 0.0 and t_local < l:
        p = G(s, (k % n) / n)
        q = G(s, ((k + l) / n) % 1.0)
        return MinimalLinearCurve(p, q).point_at(t_local / l)
    return G(s, ((k + t_local) / n) % 1.0)


def pl_refine(G, n: int, l: float, s: float, t: float) -> ProjPoint:
    """Evaluate the straightening interpolation at global curve parameter t."""
    u = (t % 1.0) * n
    k = min(int(u), n - 1)
    return pl_refine_local(G, n, l, s, k, u - k)


def refine_stage_samples(G, n: int, l: float, s: float, m: int = 256) -> list[ProjPoint]:
    return [pl_refine(G, n, l, s, i / m) for i in range(m)]


def pl_snapshot(G, n: int, s: float) -> PLVertexPath:
    """The PL knot through the n samples of G(s, .) (the l = 1 stage)."""
    return PLVertexPath([G(s, k / n) for k in range(n)])


def choose_refinement_n(G, eps: float, *, s_samples: int = 5, start_n: int = 8,
                        max_n: int = 4096) -> int:
    """Double n until adjacent gaps are below eps/4 and below half the
    observed embedding separation of the sampled family."""
    ss = np.linspace(0.0, 1.0, s_samples)
    n = start_n
    while n <= max_n:
        ok = True
        for s in ss:
            verts = [G(s, k / n) for k in range(n)]
            gaps = [dist_components(verts[k], verts[(k + 1) % n]).d0 for k in range(n)]
            sep = embedding_separation([G(s, i / 256) for i in range(256)],
                                       window=2.0 / n)
            if max(gaps) >= min(0.25 * eps, 0.5 * sep):
                ok = False
                break
        if ok:
            return n
        n *= 2
    raise RuntimeError(f"no admissible n below {max_n}; family too tight for eps={eps}")


def embedding_separation(samples, window: float) -> float:
    """Minimum pairwise d0 between samples at circular parameter distance
    beyond ``window``; a positive value certifies embeddedness at the
    sampling resolution."""
    pts = list(samples)
    m = len(pts)
    base = np.array([[p.x, p.y] for p in pts])
    ang = np.array([p.line_angle for p in pts])
    dx = base[:, None, 0] - base[None, :, 0]
    dy = base[:, None, 1] - base[None, :, 1]
    d_h = np.hypot(dx, dy)
    da = np.abs(ang[:, None] - ang[None, :]) % math.pi
    d_v = np.minimum(da, math.pi - da)
    d0 = np.maximum(d_h, d_v)
    idx = np.arange(m)
    pdist = np.abs(idx[:, None] - idx[None, :]) / m
    pdist = np.minimum(pdist, 1.0 - pdist)
    mask = pdist > window
    if not np.any(mask):
        raise ValueError("window excludes every sample pair")
    return float(np.min(d0[mask]))


# ---------------------------------------------------------------------------
# random curve corpus


def random_corpus(count: int = 20, *, seed: int = 42, degree: int = 4,
                  samples: int = 512, max_crossings: int = 14,
                  min_crossings: int = 0) -> list[TrigCurve]:
    """Reproducible immersed closed curves without self-tangencies.

    Trigonometric polynomials with decaying random coefficients, rescaled
    into the disk, rejecting near-tangencies, crossing pairs closer than
    5e-3 in parameter, and sluggish speed (all of which would make crossing
    data ill-conditioned).
    """
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, degree + 1) ** 1.5
    out: list[TrigCurve] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError("corpus rejection rate unexpectedly high")
        coeffs = rng.normal(size=(4, degree)) * weights
        curve = TrigCurve(coeffs, name=f"corpus-{len(out)}")
        pts = curve.point(np.linspace(0.0, 1.0, 512, endpoint=False))
        rmax = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
        if rmax < 1e-3:
            continue
        curve = TrigCurve(coeffs * (0.85 / rmax), name=f"corpus-{len(out)}")
        v = curve.velocity(np.linspace(0.0, 1.0, 1024, endpoint=False))
        speed = np.hypot(v[:, 0], v[:, 1])
        if np.min(speed) < 0.15 * np.mean(speed):
            continue
        try:
            loop = TangentLoop(curve, samples)
            crossings = find_crossings(loop)
            for c in crossings:
                c.sign = crossing_sign(c, loop, angular_tol=0.05)
                c.ctype = crossing_type(c, loop)
        except (SelfTangencyError, DegenerateCrossingError, NonIntegralClassError,
                ValueError):
            continue
        if not (min_crossings <= len(crossings) <= max_crossings):
            continue
        params = sorted([c.l for c in crossings] + [c.l_prime for c in crossings])
        if any(_circ_dist(a, b) < 5e-3
               for a, b in zip(params, params[1:] + params[:1])
               if a != b):
            continue
        out.append(curve)
    return out


def perturbation_deltas(rng, shape, amplitude: float) -> np.ndarray:
    """Coefficient perturbation with the same harmonic decay as the corpus."""
    degree = shape[1]
    weights = 1.0 / np.arange(1, degree + 1) ** 1.5
    return rng.normal(size=shape) * weights * amplitude
