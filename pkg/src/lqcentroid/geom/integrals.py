"""Exact integrals of powers of linear forms over polytopes.

On a simplex ``S`` with vertices ``v_0..v_d`` and a linear form ``l``,

    int_S l(y)^q dy = |S| q! d! / (q + d)! * h_q(l(v_0), ..., l(v_d)),

where ``h_q`` is the complete homogeneous symmetric polynomial. A polytope
is triangulated (Delaunay on its vertices) and the simplex values summed.
"""
import math

import numpy as np
from scipy.spatial import Delaunay, HalfspaceIntersection, ConvexHull

from ..bodies import FEAS_TOL, HPolytope, chebyshev_center

__all__ = ["complete_homogeneous", "simplex_power_integral", "polytope_power_integral", "clip_halfspace"]


def complete_homogeneous(values, q):
    """``h_q`` of each row of ``values`` (shape ``(m, d+1)``)."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    H = np.zeros((len(values), q + 1))
    H[:, 0] = 1.0
    for j in range(values.shape[1]):
        x = values[:, j]
        # h_k(x_0..x_j) = h_k(x_0..x_{j-1}) + x_j h_{k-1}(x_0..x_j)
        for k in range(1, q + 1):
            H[:, k] = H[:, k] + x * H[:, k - 1]
    return H[:, q]


def simplex_power_integral(simplices, direction, q):
    """Sum over simplices (shape ``(m, d+1, d)``) of ``int <y, direction>^q dy``."""
    simplices = np.asarray(simplices, dtype=float)
    d = simplices.shape[2]
    edges = simplices[:, 1:, :] - simplices[:, :1, :]
    vols = np.abs(np.linalg.det(edges)) / math.factorial(d)
    ell = simplices @ np.asarray(direction, dtype=float)
    coef = math.factorial(q) * math.factorial(d) / math.factorial(q + d)
    return float((vols * coef * complete_homogeneous(ell, q)).sum())


def clip_halfspace(polytope, normal, offset=0.0):
    """``polytope ∩ {<y, normal> <= offset}`` as an :class:`HPolytope`.

    Raises ``ValueError`` when the intersection has empty interior.
    """
    A = np.vstack([polytope.A, np.asarray(normal, dtype=float)])
    b = np.append(polytope.b, offset)
    _, radius = chebyshev_center(A, b)
    if not radius > FEAS_TOL:
        raise ValueError("half-slice is empty")
    return HPolytope(A, b)


def _vertices(polytope):
    if polytope.dim == 1:
        return polytope.vertices
    hs = HalfspaceIntersection(np.hstack([polytope.A, -polytope.b[:, None]]), polytope.interior_point())
    pts = hs.intersections
    return pts[ConvexHull(pts).vertices]


def polytope_power_integral(polytope, direction, q, side=None):
    """``int |<y, direction>|^q dy`` over an H-polytope, exactly, for integer q.

    Parameters
    ----------
    polytope : HPolytope
    direction : array_like
    q : int
        Nonnegative integer order.
    side : {None, 1, -1}
        Restrict to the half ``side * <y, direction> >= 0``.
    """
    if int(q) != q or q < 0:
        raise ValueError("exact integration needs a nonnegative integer order")
    q = int(q)
    direction = np.asarray(direction, dtype=float)
    if side is None:
        if q % 2 == 0:
            return _integrate(polytope, direction, q)
        total = 0.0
        for s in (1, -1):
            try:
                total += polytope_power_integral(polytope, direction, q, s)
            except ValueError:
                pass
        return total
    half = clip_halfspace(polytope, -side * direction)
    return _integrate(half, side * direction, q)


def _integrate(polytope, direction, q):
    V = _vertices(polytope)
    if polytope.dim == 1:
        lo, hi = sorted(V[:, 0] * direction[0])
        # int_lo^hi t^q dt / |direction|
        return (hi ** (q + 1) - lo ** (q + 1)) / (q + 1) / abs(direction[0])
    tri = Delaunay(V)
    return simplex_power_integral(V[tri.simplices], direction, q)
