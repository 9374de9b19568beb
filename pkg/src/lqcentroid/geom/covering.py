"""Covering numbers of low-dimensional bodies and nets for convex hulls of unions.

Covering counts come from a farthest-first traversal of a dense point set
started at the centroid. After ``k`` centres the covering radius ``rho_k``
is nonincreasing, so ``N(r) = min{k : rho_k <= r}`` is monotone in ``r`` by
construction. The centres picked up to that point are pairwise more than
``r`` apart, which also makes them a packing.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .._rng import make_rng
from ..bodies import ConvexBody, unit_ball_volume
from ..sampler import sample_uniform

__all__ = [
    "CoveringResult",
    "HullNet",
    "CoverageError",
    "grid_points",
    "farthest_first",
    "covering_number",
    "greedy_packing",
    "volumetric_check",
    "segment_net",
    "cube_net",
    "hull_cover_net",
]

HULL_STREAM = 5
MAX_NET_POINTS = 5_000_000


class CoverageError(ValueError):
    """A hull sample lies farther than ``2t`` from the net; ``witness`` is that sample."""

    def __init__(self, message, witness, distance):
        super().__init__(message)
        self.witness = witness
        self.distance = distance


def grid_points(body, spacing):
    """Points of the cubic lattice ``spacing * Z^n`` inside ``body``.

    Returns the points and the resolution ``spacing * sqrt(n)`` (the cell
    diameter), which bounds the distance from a body point to the set when
    the inradius exceeds the spacing.
    """
    n = body.dim
    E = np.eye(n)
    hi = body.support(E)
    lo = -body.support(-E)
    axes = [spacing * np.arange(math.floor(a / spacing), math.ceil(b / spacing) + 1) for a, b in zip(lo, hi)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    pts = mesh[body.membership(mesh)]
    if len(pts) == 0:
        raise ValueError("grid spacing is too coarse for this body")
    return pts, spacing * math.sqrt(n)


def farthest_first(points, stop_radius=0.0):
    """Farthest-first order starting from the point nearest the centroid.

    The traversal stops once the covering radius is at most ``stop_radius``.

    Returns
    -------
    order : ndarray of int
        Indices of the centres in the order chosen.
    radii : ndarray
        ``radii[k]`` is the covering radius of the first ``k + 1`` centres.
    """
    P = np.asarray(points, dtype=float)
    start = int(np.argmin(np.linalg.norm(P - P.mean(axis=0), axis=1)))
    order = [start]
    dist = np.linalg.norm(P - P[start], axis=1)
    radii = [dist.max()]
    while radii[-1] > stop_radius:
        nxt = int(np.argmax(dist))
        order.append(nxt)
        np.minimum(dist, np.linalg.norm(P - P[nxt], axis=1), out=dist)
        radii.append(dist.max())
    return np.array(order), np.array(radii)


def greedy_packing(points, separation, order=None):
    """Size of a maximal ``separation``-separated subset.

    Points are scanned along ``order`` (farthest-first centres, when given)
    starting from its second entry, which is an extreme point; the
    centre-most first entry and the remaining points follow.
    """
    P = np.asarray(points, dtype=float)
    tree = cKDTree(P)
    blocked = np.zeros(len(P), dtype=bool)
    scan = np.arange(len(P)) if order is None else np.concatenate([order[1:], order[:1], np.arange(len(P))])
    count = 0
    for i in scan:
        if blocked[i]:
            continue
        count += 1
        blocked[tree.query_ball_point(P[i], separation)] = True
    return count


@dataclass
class CoveringResult:
    radii: np.ndarray
    cover: np.ndarray
    packing: np.ndarray
    resolution: float
    n_points: int
    volume: float = float("nan")
    extras: dict = field(default_factory=dict)

    def rows(self):
        return [
            {"r": float(r), "cover": int(c), "packing_2r": int(p)}
            for r, c, p in zip(self.radii, self.cover, self.packing)
        ]


def covering_number(target, radii, resolution=None, with_packing=True):
    """Greedy covering counts ``N(r)`` and packing lower bounds for ``n <= 4``.

    Parameters
    ----------
    target : ConvexBody or ndarray
        A body (a lattice of resolution ``min(radii) / 4`` is built inside
        it) or a dense point set, in which case ``resolution`` is required.
    radii : sequence of float
    resolution : float, optional
        Bound on the distance from body points to the point set.

    Returns
    -------
    CoveringResult
        ``cover[j]`` covers the point set at ``radii[j]``; ``packing[j]`` is
        a ``2 r``-separated set size, a lower bound for covering at ``r``.
    """
    radii = np.sort(np.asarray(radii, dtype=float))
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    volume = float("nan")
    if isinstance(target, ConvexBody):
        if target.dim > 4:
            raise ValueError("covering numbers are computed for n <= 4")
        spacing = radii[0] / (4 * math.sqrt(target.dim))
        points, resolution = grid_points(target, spacing)
        try:
            volume = target.volume_exact()
        except (NotImplementedError, ValueError):
            pass
    else:
        points = np.asarray(target, dtype=float)
        if resolution is None:
            raise ValueError("a point set needs its resolution")
    if resolution > radii[0] / 4 + 1e-12:
        raise ValueError(f"resolution {resolution:.4g} is coarser than r/4 = {radii[0] / 4:.4g}")
    order, rho = farthest_first(points, radii[0])
    cover = np.array([int(np.argmax(rho <= r)) + 1 for r in radii])
    packing = np.array([greedy_packing(points, 2 * r, order) for r in radii]) if with_packing else np.zeros_like(cover)
    return CoveringResult(radii, cover, packing, float(resolution), len(points), volume)


def volumetric_check(result, dim, offset_volume=None):
    """Volume comparisons for each radius in a :class:`CoveringResult`.

    Two facts are checked. Any cover at radius ``r`` has at least
    ``|K| / |r B|`` balls. The farthest-first centres at radius ``2t`` are
    ``2t``-separated points of ``K``, so their ``t``-balls are disjoint
    inside ``K + t B`` and ``|t B| N(2t) <= |K + t B|``; this needs
    ``offset_volume(t)``.
    """
    rows = []
    for r, c in zip(result.radii, result.cover):
        ball = unit_ball_volume(dim) * r**dim
        row = {"r": float(r), "cover": int(c), "lower": result.volume / ball}
        row["lower_ok"] = bool(c >= row["lower"] * (1 - 1e-9)) if np.isfinite(row["lower"]) else True
        if offset_volume is not None:
            t = r / 2
            rhs = offset_volume(t)
            row["offset_bound"] = rhs / (unit_ball_volume(dim) * t**dim)
            row["offset_ok"] = bool(c <= row["offset_bound"])
        rows.append(row)
    return rows


def segment_net(a, b, t):
    """Points on the segment ``[a, b]`` covering it at radius ``t``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = max(1, math.ceil(np.linalg.norm(b - a) / (2 * t)))
    s = (np.arange(m) + 0.5) / m
    return a + s[:, None] * (b - a)


def cube_net(dim, half_side, t):
    """Lattice points of ``[-a, a]^n`` covering it at radius ``t``."""
    m = max(1, math.ceil(2 * half_side * math.sqrt(dim) / (2 * t)))
    axis = -half_side + (np.arange(m) + 0.5) * (2 * half_side / m)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def _l1_grid(s, delta):
    """Nonnegative points ``k * delta`` with ``||k||_1 <= floor(1/delta)``."""
    M = int(math.floor(1.0 / delta + 1e-12))
    pts = [()]
    for _ in range(s):
        pts = [p + (k,) for p in pts for k in range(M + 1 - sum(p))]
    return delta * np.array(pts, dtype=float)


@dataclass
class HullNet:
    points: np.ndarray
    grid: np.ndarray
    constant: float
    max_distance: float
    n_samples: int
    violations: int


def _sample_set(A, m, rng, seed, index):
    if isinstance(A, ConvexBody):
        sub_seed = int(make_rng(seed, HULL_STREAM, index + 1).integers(2**63))
        return sample_uniform(A, m, sub_seed).points
    V = np.atleast_2d(np.asarray(A, dtype=float))
    lam = rng.dirichlet(np.ones(len(V)), size=m)
    return lam @ V


def hull_cover_net(nets, R, t, sets, n_samples=10_000, seed=0):
    """Net of ``conv(A_1 ∪ ... ∪ A_s)`` from ``t``-nets of the convex sets ``A_i``.

    The net is ``{sum z_i x_i}`` with ``x_i`` in the ``i``-th net and ``z``
    in a grid of step ``t / (R s)`` on the nonnegative part of the
    ``l_1`` ball, which is within ``t / R`` of every point of the simplex in
    ``l_1``. Coverage at ``2 t`` is then checked on ``n_samples`` random
    points ``sum lambda_i a_i`` of the hull.

    Parameters
    ----------
    nets : list of ndarray
        ``nets[i]`` covers ``sets[i]`` at radius ``t``; its points must lie
        in ``R B_2^n``.
    sets : list
        Each a :class:`ConvexBody` or an array of vertices whose convex
        hull is ``A_i``.

    Returns
    -------
    HullNet
        ``constant`` is ``|Z|^{1/s} t / R`` for the grid ``Z`` used.

    Raises
    ------
    CoverageError
        With the first witness farther than ``2 t`` from the net.
    """
    s = len(nets)
    if s != len(sets) or s == 0:
        raise ValueError("need one net per set")
    nets = [np.atleast_2d(np.asarray(x, dtype=float)) for x in nets]
    for x in nets:
        if np.max(np.linalg.norm(x, axis=1)) > R * (1 + 1e-12):
            raise ValueError("net points must lie in R B_2^n")
    if s == 1:
        grid = np.ones((1, 1))
        net = nets[0]
    else:
        grid = _l1_grid(s, t / (R * s))
        size = len(grid) * math.prod(len(x) for x in nets)
        if size > MAX_NET_POINTS:
            raise ValueError(f"combined net would have {size} points (limit {MAX_NET_POINTS})")
        combos = nets[0][None, :, :] * grid[:, 0, None, None]
        combos = combos.reshape(-1, nets[0].shape[1])
        for i in range(1, s):
            # combos indexed by (grid row, x_1..x_{i}); expand by the next net
            per_row = combos.reshape(len(grid), -1, combos.shape[1])
            step = grid[:, i, None, None, None] * nets[i][None, None, :, :]
            combos = (per_row[:, :, None, :] + step).reshape(-1, combos.shape[1])
        net = np.unique(np.round(combos, 12), axis=0)
    rng = make_rng(seed, HULL_STREAM)
    lam = rng.dirichlet(np.ones(s), size=n_samples)
    W = sum(lam[:, i, None] * _sample_set(sets[i], n_samples, rng, seed, i) for i in range(s))
    dist, _ = cKDTree(net).query(W)
    bad = np.flatnonzero(dist > 2 * t * (1 + 1e-12))
    if len(bad):
        j = int(bad[0])
        raise CoverageError(f"{len(bad)} hull samples farther than 2t = {2 * t:g}", W[j], float(dist[j]))
    constant = len(grid) ** (1.0 / s) * t / R
    return HullNet(net, grid, constant, float(dist.max()), n_samples, 0)
