"""Quermassintegrals of planar and spatial polytopes.

With ``|K + t B| = sum_j C(n, j) W_j t^j`` (``W_0 = |K|``, ``W_n = |B_2^n|``)
two estimators are provided: a fit of the Steiner polynomial to offset
volumes, and Kubota averages ``W_j = |B_2^n| / |B_2^{n-j}| * E |P_F K|``
over random ``(n - j)``-dimensional subspaces ``F``.
"""
import math
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull
from scipy.stats import special_ortho_group

from .._rng import make_rng
from ..bodies import Ball, unit_ball_volume

__all__ = [
    "QuermassError",
    "polytope_vertices",
    "offset_area",
    "offset_volume_mc",
    "steiner_fit",
    "kubota",
    "quermassintegrals",
]

KUBOTA_STREAM = 6
OFFSET_STREAM = 7
AGREEMENT_TOL = 0.05


class QuermassError(ValueError):
    """Steiner and Kubota estimates disagree by more than 5%."""


def polytope_vertices(body):
    """Vertices of a polytope body (any class exposing ``vertices`` or an H-form)."""
    V = getattr(body, "vertices", None)
    if V is None:
        V = body.to_hpolytope().vertices
    V = np.asarray(V, dtype=float)
    return V[ConvexHull(V).vertices]


def offset_area(V, t):
    """Exact ``|K + t B_2^2|`` for the polygon ``conv(V)``."""
    hull = ConvexHull(V)
    # in 2-D scipy reports the perimeter as ``area`` and the area as ``volume``
    return hull.volume + hull.area * t + math.pi * t * t


def _segment_distance(X, a, b):
    d = b - a
    s = np.clip(((X - a) @ d) / (d @ d), 0.0, 1.0)
    return np.linalg.norm(X - a - s[:, None] * d, axis=1)


def _distance_to_polytope(X, V, hull):
    """Euclidean distance from each row of ``X`` to the 3-D polytope ``conv(V)``."""
    eq = hull.equations
    inside = np.all(X @ eq[:, :3].T + eq[:, 3] <= 1e-12, axis=1)
    best = np.full(len(X), np.inf)
    edges = set()
    for simplex, plane in zip(hull.simplices, eq):
        tri = V[simplex]
        normal, off = plane[:3], plane[3]
        h = X @ normal + off
        P = X - h[:, None] * normal
        # barycentric test for the foot of the perpendicular
        e0, e1 = tri[1] - tri[0], tri[2] - tri[0]
        w = P - tri[0]
        d00, d01, d11 = e0 @ e0, e0 @ e1, e1 @ e1
        den = d00 * d11 - d01 * d01
        u = ((w @ e0) * d11 - (w @ e1) * d01) / den
        v = ((w @ e1) * d00 - (w @ e0) * d01) / den
        foot = (u >= 0) & (v >= 0) & (u + v <= 1)
        best = np.where(foot, np.minimum(best, np.abs(h)), best)
        for i, j in ((0, 1), (1, 2), (0, 2)):
            edges.add(tuple(sorted((simplex[i], simplex[j]))))
    for i, j in edges:
        best = np.minimum(best, _segment_distance(X, V[i], V[j]))
    best[inside] = 0.0
    return best


def offset_volume_mc(V, ts, n_samples=1_000_000, seed=0, chunk=200_000):
    """MC volumes of ``conv(V) + t B_2^3`` for each ``t``, from common samples.

    Returns
    -------
    volumes : ndarray
    cov : ndarray
        Covariance matrix of the volume estimates.
    """
    ts = np.asarray(ts, dtype=float)
    V = np.asarray(V, dtype=float)
    hull = ConvexHull(V)
    lo = V.min(axis=0) - ts.max()
    hi = V.max(axis=0) + ts.max()
    box = float(np.prod(hi - lo))
    rng = make_rng(seed, OFFSET_STREAM)
    sums = np.zeros(len(ts))
    cross = np.zeros((len(ts), len(ts)))
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        X = lo + (hi - lo) * rng.random((m, 3))
        I = (_distance_to_polytope(X, V, hull)[:, None] <= ts).astype(float)
        sums += I.sum(axis=0)
        cross += I.T @ I
        done += m
    p = sums / n_samples
    cov = (cross / n_samples - np.outer(p, p)) * box**2 / n_samples
    return box * p, cov


def steiner_fit(n, ts, volumes, cov=None, volume=None):
    """Quermassintegrals from offset volumes at the radii ``ts``.

    For ``n = 2`` the polynomial is interpolated exactly. Otherwise ``W_0``
    and ``W_n`` are pinned (to ``volume`` and ``|B_2^n|``) and the middle
    coefficients fitted by least squares.

    Returns
    -------
    (W, se) : tuple of ndarray
    """
    ts = np.asarray(ts, dtype=float)
    volumes = np.asarray(volumes, dtype=float)
    binom = np.array([math.comb(n, j) for j in range(n + 1)], dtype=float)
    if cov is None:
        A = np.vander(ts, n + 1, increasing=True) * binom
        W = np.linalg.solve(A, volumes)
        return W, np.zeros(n + 1)
    ball = unit_ball_volume(n)
    rhs = volumes - volume - ball * ts**n
    A = np.vander(ts, n + 1, increasing=True)[:, 1:n] * binom[1:n]
    G = np.linalg.pinv(A)
    mid = G @ rhs
    mid_cov = G @ cov @ G.T
    W = np.concatenate([[volume], mid, [ball]])
    se = np.concatenate([[0.0], np.sqrt(np.diag(mid_cov)), [0.0]])
    return W, se


def _random_subspaces(n, k, count, seed):
    rng = make_rng(seed, KUBOTA_STREAM, k)
    Q = special_ortho_group.rvs(n, size=count, random_state=rng) if n > 1 else np.ones((count, 1, 1))
    return Q.reshape(count, n, n)[:, :, :k]


def _projection_volume(V, F):
    P = V @ F
    if F.shape[1] == 1:
        return float(P.max() - P.min())
    return float(ConvexHull(P).volume)


def kubota(V, n_subspaces=2000, seed=0):
    """Kubota estimates of ``W_1 .. W_{n-1}`` with standard errors."""
    V = np.asarray(V, dtype=float)
    n = V.shape[1]
    W, se = [], []
    for j in range(1, n):
        k = n - j
        Fs = _random_subspaces(n, k, n_subspaces, seed)
        vals = np.array([_projection_volume(V, F) for F in Fs])
        c = unit_ball_volume(n) / unit_ball_volume(k)
        W.append(c * vals.mean())
        se.append(c * vals.std(ddof=1) / math.sqrt(n_subspaces))
    return np.array(W), np.array(se)


def quermassintegrals(body, n_subspaces=2000, n_samples=1_000_000, seed=0):
    """Quermassintegrals of a polytope (or ball) in dimension 2 or 3.

    Returns
    -------
    dict
        ``steiner`` and ``steiner_se`` (length ``n + 1``), ``kubota`` and
        ``kubota_se`` (entries ``1 .. n-1``), ``rel_gap`` between them and
        ``method`` of the Steiner fit.

    Raises
    ------
    QuermassError
        When the two estimators differ by more than 5% in any entry.
    """
    n = body.dim
    if n not in (2, 3):
        raise ValueError("quermassintegrals are computed for n in {2, 3}")
    if isinstance(body, Ball):
        r = body.radius
        W = np.array([unit_ball_volume(n) * r ** (n - j) for j in range(n + 1)])
        return {
            "steiner": W,
            "steiner_se": np.zeros(n + 1),
            "kubota": W[1:n],
            "kubota_se": np.zeros(n - 1),
            "rel_gap": np.zeros(n - 1),
            "method": "closed form",
        }
    V = polytope_vertices(body)
    if n == 2:
        ts = np.array([0.0, 0.5, 1.0])
        W, W_se = steiner_fit(2, ts, [offset_area(V, t) for t in ts])
        method = "exact offset area"
    else:
        ts = np.array([0.25, 0.5, 0.75, 1.0])
        vols, cov = offset_volume_mc(V, ts, n_samples, seed)
        W, W_se = steiner_fit(3, ts, vols, cov, ConvexHull(V).volume)
        method = "MC offset volume"
    K, K_se = kubota(V, n_subspaces, seed)
    gap = np.abs(W[1:n] - K) / np.abs(W[1:n])
    if np.any(gap > AGREEMENT_TOL):
        raise QuermassError(f"Steiner and Kubota estimates disagree: relative gaps {gap.round(4).tolist()}")
    return {"steiner": W, "steiner_se": W_se, "kubota": K, "kubota_se": K_se, "rel_gap": gap, "method": method}
