"""Immersed plane curves: builtins, CSV input, and trigonometric families.

Curves are parametrized over ``t in [0, 1)`` and evaluated through vectorized
``point``/``velocity`` callables.  The builtin names understood by
:func:`named_curve` are ``circle``, ``lemniscate`` (a figure eight with its
double point at the origin), ``rose-k`` (k petals with k simple crossings
near the center, e.g. ``rose-3``) and ``segment``.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

TWO_PI = 2.0 * math.pi


class ImmersionError(ValueError):
    """Curve speed vanishes somewhere: not an immersion."""


class ParametricCurve:
    """Plane curve with analytic velocity, closed unless stated otherwise."""

    def __init__(self, point_fn, velocity_fn, *, closed=True, name="curve"):
        self._point = point_fn
        self._velocity = velocity_fn
        self.closed = bool(closed)
        self.name = name

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack(self._point(t), axis=-1)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack(self._velocity(t), axis=-1)

    def min_speed(self, samples: int = 2048) -> float:
        v = self.velocity(np.linspace(0.0, 1.0, samples, endpoint=False))
        return float(np.min(np.hypot(v[:, 0], v[:, 1])))

    def __repr__(self):
        return f"<ParametricCurve {self.name!r} closed={self.closed}>"


def circle(radius: float = 0.9, center=(0.0, 0.0)) -> ParametricCurve:
    cx, cy = center

    def p(t):
        u = TWO_PI * t
        return cx + radius * np.cos(u), cy + radius * np.sin(u)

    def v(t):
        u = TWO_PI * t
        return -TWO_PI * radius * np.sin(u), TWO_PI * radius * np.cos(u)

    return ParametricCurve(p, v, name=f"circle(r={radius})")


def lemniscate(scale: float = 0.9) -> ParametricCurve:
    """Figure eight ``(a cos u, (a/2) sin 2u)`` crossing itself at the origin."""

    def p(t):
        u = TWO_PI * t
        return scale * np.cos(u), 0.5 * scale * np.sin(2.0 * u)

    def v(t):
        u = TWO_PI * t
        return -TWO_PI * scale * np.sin(u), TWO_PI * scale * np.cos(2.0 * u)

    return ParametricCurve(p, v, name="lemniscate")


def rose(k: int = 3, scale: float = 0.28) -> ParametricCurve:
    """k-petal curve ``z = e^{-iu} + 2 e^{i(k-1)u}`` with k simple crossings.

    For odd k this is the standard (2, k) torus-knot shadow (k = 3 gives the
    trefoil shape).  The polar rose ``r = cos(k phi)`` is unsuitable here:
    its petals all cross at one k-fold point.
    """
    if k < 2:
        raise ValueError("rose needs k >= 2")
    m = k - 1

    def p(t):
        u = TWO_PI * t
        return (scale * (np.cos(u) + 2.0 * np.cos(m * u)),
                scale * (-np.sin(u) + 2.0 * np.sin(m * u)))

    def v(t):
        u = TWO_PI * t
        return (TWO_PI * scale * (-np.sin(u) - 2.0 * m * np.sin(m * u)),
                TWO_PI * scale * (-np.cos(u) + 2.0 * m * np.cos(m * u)))

    return ParametricCurve(p, v, name=f"rose-{k}")


def segment(p0=(-0.8, 0.0), p1=(0.8, 0.0)) -> ParametricCurve:
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    d = p1 - p0

    def p(t):
        return p0[0] + t * d[0], p0[1] + t * d[1]

    def v(t):
        one = np.ones_like(t)
        return d[0] * one, d[1] * one

    return ParametricCurve(p, v, closed=False, name="segment")


class TrigCurve(ParametricCurve):
    """Closed trigonometric polynomial curve, kept perturbable via its coefficients.

    ``coeffs`` has shape (4, degree): rows are cos/sin coefficients of x then
    y, harmonic m = 1..degree.
    """

    def __init__(self, coeffs, *, name="trig-curve"):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != 4:
            raise ValueError("coeffs must have shape (4, degree)")
        degree = self.coeffs.shape[1]
        harmonics = np.arange(1, degree + 1)

        def p(t):
            u = TWO_PI * np.asarray(t, dtype=float)[..., None] * harmonics
            c, s = np.cos(u), np.sin(u)
            x = c @ self.coeffs[0] + s @ self.coeffs[1]
            y = c @ self.coeffs[2] + s @ self.coeffs[3]
            return x, y

        def v(t):
            u = TWO_PI * np.asarray(t, dtype=float)[..., None] * harmonics
            w = TWO_PI * harmonics
            c, s = np.cos(u), np.sin(u)
            x = -(s * w) @ self.coeffs[0] + (c * w) @ self.coeffs[1]
            y = -(s * w) @ self.coeffs[2] + (c * w) @ self.coeffs[3]
            return x, y

        super().__init__(p, v, closed=True, name=name)

    def perturbed(self, delta) -> "TrigCurve":
        return TrigCurve(self.coeffs + np.asarray(delta, dtype=float),
                         name=self.name + "~")


def from_samples(points, *, closed=True, name="sampled-curve") -> ParametricCurve:
    """Smooth a sampled curve with a (periodic) cubic spline."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
        raise ValueError("need an (m, 2) array with m >= 4")
    if closed:
        ts = np.linspace(0.0, 1.0, len(pts) + 1)
        data = np.vstack([pts, pts[:1]])
        spl = CubicSpline(ts, data, bc_type="periodic")
    else:
        ts = np.linspace(0.0, 1.0, len(pts))
        spl = CubicSpline(ts, pts)
    dspl = spl.derivative()

    def p(t):
        xy = spl(np.mod(t, 1.0) if closed else t)
        return xy[..., 0], xy[..., 1]

    def v(t):
        xy = dspl(np.mod(t, 1.0) if closed else t)
        return xy[..., 0], xy[..., 1]

    return ParametricCurve(p, v, closed=closed, name=name)


def load_curve_csv(path, *, closed=True) -> ParametricCurve:
    """Read ``t,x,y`` rows (t uniform over [0,1)) and spline them."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#") or row[0].strip() == "t":
                continue
            rows.append((float(row[0]), float(row[1]), float(row[2])))
    rows.sort()
    pts = np.array([(x, y) for _, x, y in rows])
    return from_samples(pts, closed=closed, name=Path(path).stem)


def named_curve(name: str) -> ParametricCurve:
    """Resolve a builtin curve name or a CSV path."""
    if name == "circle":
        return circle()
    if name == "lemniscate":
        return lemniscate()
    if name == "segment":
        return segment()
    if name.startswith("rose-"):
        return rose(int(name.split("-", 1)[1]))
    path = Path(name)
    if path.suffix == ".csv" and path.exists():
        return load_curve_csv(path)
    raise ValueError(f"unknown curve {name!r}")
