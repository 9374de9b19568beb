"""Polytope brackets for ``Z_q`` in the plane and in space.

Given support values ``h(u_j)`` on a direction grid, the halfspaces
``<x, u_j> <= h(u_j)`` cut out an outer polytope. For the empirical
measure ``h`` is differentiable almost everywhere and its gradient at
``u_j`` is the boundary point of ``Z_q`` touching that hyperplane; the hull
of those points is an inner polytope. Both are exact for the empirical
centroid body, so the bracket only carries the discretisation error.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.special import beta

from ..bodies import HPolytope, VPolytope, unit_ball_volume
from ..moments import _points

__all__ = [
    "ZqBracket",
    "grid_directions",
    "zq_polytope",
    "zq_support_and_points",
    "ball_zq_support",
    "lyz_check",
    "projection_volume_check",
    "kq_body",
]


@dataclass
class ZqBracket:
    q: float
    inner_volume: float
    outer_volume: float
    inner: VPolytope
    outer: HPolytope
    rel_se: float
    dir_count: int

    @property
    def volume(self):
        return 0.5 * (self.inner_volume + self.outer_volume)

    @property
    def rel_width(self):
        return (self.outer_volume - self.inner_volume) / self.inner_volume


def grid_directions(n, count):
    """Deterministic, nearly uniform unit directions (circle grid or Fibonacci sphere)."""
    if n == 2:
        a = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(a), np.sin(a)])
    if n == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        r = np.sqrt(1 - z * z)
        phi = np.pi * (1 + math.sqrt(5)) * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    raise ValueError("direction grids are available for n in {2, 3}")


def zq_support_and_points(X, U, q, block=64):
    """Support values, their standard errors, and tangency points of ``Z_q``."""
    N = len(X)
    h, se, grad = [], [], []
    for i in range(0, len(U), block):
        P = X @ U[i : i + block].T
        A = np.abs(P)
        Aq = A**q
        M = Aq.mean(axis=0)
        hb = M ** (1.0 / q)
        h.append(hb)
        se.append(hb / (q * M) * Aq.std(axis=0, ddof=1) / math.sqrt(N))
        W = np.sign(P) * A ** (q - 1) if q != 1 else np.sign(P)
        grad.append((W.T @ X) / N * (M ** (1.0 / q - 1))[:, None])
    return np.concatenate(h), np.concatenate(se), np.vstack(grad)


def _bracket(U, h, points, q, rel_se):
    n = U.shape[1]
    inner = VPolytope(points)
    hs = HalfspaceIntersection(np.hstack([U, -h[:, None]]), np.zeros(n))
    verts = hs.intersections
    verts = verts[ConvexHull(verts).vertices]
    outer = HPolytope(U, h)
    bracket = ZqBracket(q, inner.volume_exact(), VPolytope(verts).volume_exact(), inner, outer, rel_se, len(U))
    if bracket.rel_width > 0.05:
        warnings.warn(
            f"Z_q bracket relative width {bracket.rel_width:.3f} exceeds 5%; raise dir_count",
            RuntimeWarning,
        )
    return bracket


def zq_polytope(cloud, q, dir_count=None):
    """Inner and outer polytopes for the empirical ``Z_q`` of a cloud in R^2 or R^3.

    Parameters
    ----------
    cloud : SampleCloud or ndarray
    q : float
        Order, ``q >= 1``.
    dir_count : int, optional
        Grid size; at least 64 in the plane and 512 in space (the
        defaults are 256 and 1024).

    Returns
    -------
    ZqBracket
    """
    X = _points(cloud)
    n = X.shape[1]
    minimum = {2: 64, 3: 512}.get(n)
    if minimum is None:
        raise ValueError("zq_polytope supports n in {2, 3}")
    dir_count = {2: 256, 3: 1024}[n] if dir_count is None else int(dir_count)
    if dir_count < minimum:
        raise ValueError(f"dir_count must be >= {minimum} in dimension {n}")
    if q < 1:
        raise ValueError("q must be >= 1")
    U = grid_directions(n, dir_count)
    h, se, pts = zq_support_and_points(X, U, q)
    return _bracket(U, h, pts, q, float(np.mean(se / h)))


def ball_zq_support(n, q):
    """Constant support value of ``Z_q`` of the volume-one Euclidean ball."""
    radius = unit_ball_volume(n) ** (-1.0 / n)
    moment = beta((q + 1) / 2, (n + 1) / 2) / beta(0.5, (n + 1) / 2)
    return radius * moment ** (1.0 / q)


def lyz_check(cloud, q, dir_count=None):
    """Ratio ``|Z_q(K)|^{1/n} / |Z_q(ball)|^{1/n}`` for a volume-one body.

    ``cloud`` must sample the uniform measure on a body of volume one (the
    ratio is not scale invariant).

    Returns
    -------
    dict
        ``ratio`` (bracket midpoint), ``ratio_inner``, ``ratio_outer`` and
        ``se``, the combined relative error of the MC estimate and the
        half-width of the bracket.
    """
    X = _points(cloud)
    n = X.shape[1]
    source = getattr(cloud, "source", None)
    if source is not None and hasattr(source, "volume_exact"):
        vol = source.volume_exact()
        if abs(vol - 1) > 1e-9:
            raise ValueError(f"body must have volume one, got {vol}")
    br = zq_polytope(X, q, dir_count)
    ball = unit_ball_volume(n) * ball_zq_support(n, q) ** n
    r_in = (br.inner_volume / ball) ** (1.0 / n)
    r_out = (br.outer_volume / ball) ** (1.0 / n)
    ratio = 0.5 * (r_in + r_out)
    half_width = 0.5 * (r_out - r_in) / ratio
    return {
        "ratio": ratio,
        "ratio_inner": r_in,
        "ratio_outer": r_out,
        "se": math.hypot(br.rel_se, half_width),
        "bracket": br,
    }


def projection_volume_check(cloud, q, F, L, dir_count=None):
    """``|P_F(K_q)|^{1/k}`` against ``max(sqrt(q/k), 1) |B_2^k|^{1/k}``, k in {1, 2}.

    Returns
    -------
    dict
        ``volume`` of ``P_F K_q``, ``raw_ratio`` =
        ``|P_F K_q|^{1/k} / |B_2^k|^{1/k}``, ``bound_factor`` =
        ``max(sqrt(q/k), 1)`` and ``ratio`` = raw / bound factor.
    """
    X = _points(cloud)
    cols = np.atleast_2d(np.asarray(getattr(F, "columns", F), dtype=float))
    k = cols.shape[1]
    scale = math.sqrt(q) * L
    Y = X @ cols
    if k == 1:
        h = (np.mean(np.abs(Y[:, 0]) ** q) ** (1.0 / q)) / scale
        volume = 2 * h
    elif k == 2:
        volume = zq_polytope(Y, q, dir_count).volume / scale**2
    else:
        raise ValueError("projection_volume_check supports k in {1, 2}")
    raw = (volume / unit_ball_volume(k)) ** (1.0 / k)
    factor = max(math.sqrt(q / k), 1.0)
    return {"volume": volume, "raw_ratio": raw, "bound_factor": factor, "ratio": raw / factor}


def kq_body(cloud, q, L, dir_count=None):
    """Outer polytope of the empirical ``K_q = Z_q / (sqrt(q) L)`` in R^2 or R^3."""
    br = zq_polytope(cloud, q, dir_count)
    scale = math.sqrt(q) * L
    return HPolytope(br.outer.A, br.outer.b / scale)
