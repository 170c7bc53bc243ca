"""Shared fixtures and independent test oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from lens_scatter.eaton import eaton_metric
from lens_scatter.geometry import ConformalMetric
from lens_scatter.knot import random_corpus
from lens_scatter.scattering import boundary_grid


@pytest.fixture(scope="session")
def eaton():
    return eaton_metric()


@pytest.fixture(scope="session")
def vacuum():
    return ConformalMetric.vacuum()


@pytest.fixture(scope="session")
def grid64():
    return boundary_grid(8, 8)


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(20, seed=42)


# --- independent oracles ----------------------------------------------------


def brute_force_crossing_count(points: np.ndarray) -> int:
    """O(m^2) pairwise polyline segment intersections, grouped by location.

    Independent of the production detector (no KD-tree pruning, no Newton
    polish).  Counts isolated double points only; a k-fold point would
    count once.
    """
    pts = np.asarray(points, dtype=float)
    m = len(pts)
    nxt = np.roll(pts, -1, axis=0)
    hits = []
    for i in range(m):
        p1, p2 = pts[i], nxt[i]
        d1 = p2 - p1
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            p3, p4 = pts[j], nxt[j]
            d2 = p4 - p3
            denom = d1[0] * d2[1] - d1[1] * d2[0]
            if abs(denom) < 1e-15:
                continue
            w = p3 - p1
            t = (w[0] * d2[1] - w[1] * d2[0]) / denom
            u = (w[0] * d1[1] - w[1] * d1[0]) / denom
            if 0.0 <= t < 1.0 and 0.0 <= u < 1.0:
                hits.append(p1 + t * d1)
    groups: list[np.ndarray] = []
    for h in hits:
        if not any(np.hypot(*(h - g)) < 1e-3 for g in groups):
            groups.append(h)
    return len(groups)


def christoffel_turn_rate(metric, x: float, y: float, theta: float,
                          h: float = 1e-6) -> float:
    """Angular rate per unit metric arclength from finite-difference
    Christoffel symbols of g = n^2 * (dx^2 + dy^2)."""

    def phi(px, py):
        return math.log(metric.n_at(px, py))

    px = (phi(x + h, y) - phi(x - h, y)) / (2 * h)
    py = (phi(x, y + h) - phi(x, y - h)) / (2 * h)
    n = metric.n_at(x, y)
    # Unit metric speed: Euclidean speed 1/n.
    xd = math.cos(theta) / n
    yd = math.sin(theta) / n
    xdd = -(px * xd * xd + 2 * py * xd * yd - px * yd * yd)
    ydd = -(-py * xd * xd + 2 * px * xd * yd + py * yd * yd)
    return (xd * ydd - yd * xdd) / (xd * xd + yd * yd)
