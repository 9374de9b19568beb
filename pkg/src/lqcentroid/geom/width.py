"""Support oracles and mean width ``w(C) = int h_C(theta) sigma(dtheta)``.

The width is the spherical average of ``h_C`` itself, not of
``h_C(theta) + h_C(-theta)``; for symmetric bodies the two differ by a
factor of two.
"""
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .._rng import make_rng
from ..moments import directional_moments, max_trusted_q

__all__ = ["SupportOracle", "sphere_sample", "mean_width", "kq_mean_width"]

WIDTH_STREAM = 4
WIDTH_CONVENTION = "average of h(theta) over the sphere"


@dataclass
class SupportOracle:
    """Batched support function ``(m, n) -> (m,)`` with a standard-error model."""

    evaluate: Callable
    dim: int
    label: str = ""
    exact: bool = True

    def __call__(self, X):
        return np.asarray(self.evaluate(np.atleast_2d(X)), dtype=float)

    @classmethod
    def from_body(cls, body):
        return cls(body.support, body.dim, repr(body), True)

    @classmethod
    def from_cloud(cls, cloud, q, scale=1.0):
        """``x -> ||<., x>||_q / scale`` estimated from ``cloud``."""
        pts = getattr(cloud, "points", cloud)

        def h(X):
            return directional_moments(pts, X, q)[0] / scale

        return cls(h, pts.shape[1], f"Z_{q:g}/{scale:g}", False)

    @classmethod
    def from_tbody(cls, spec):
        from ..subgauss import t_support_levels

        def h(X):
            return t_support_levels(spec, X, with_se=False)[0].max(axis=0)

        return cls(h, spec.dim, "T", False)

    def scaled(self, lam):
        return SupportOracle(lambda X: lam * self.evaluate(X), self.dim, f"{lam:g}*{self.label}", self.exact)


def sphere_sample(n, count, seed, stream=WIDTH_STREAM):
    g = make_rng(seed, stream).standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def mean_width(oracle, n_dirs, seed):
    """Monte Carlo mean width over ``n_dirs`` uniform directions.

    Returns
    -------
    (value, se) : tuple of float
        ``se`` is the sampling error over directions.
    """
    if n_dirs < 100:
        raise ValueError("mean_width needs at least 100 directions")
    U = sphere_sample(oracle.dim, n_dirs, seed)
    h = oracle(U)
    return float(h.mean()), float(h.std(ddof=1) / math.sqrt(n_dirs))


def kq_mean_width(cloud, L, q, n_dirs, seed):
    """Mean width of ``K_q = Z_q / (sqrt(q) L)`` from an isotropic cloud."""
    pts = getattr(cloud, "points", cloud)
    N, n = pts.shape
    if q > math.sqrt(n):
        warnings.warn(f"q = {q} is above sqrt(n) = {math.sqrt(n):.2f}", RuntimeWarning)
    if q > max_trusted_q(N):
        warnings.warn(f"q = {q} exceeds the trusted limit 2 log N", RuntimeWarning)
    return mean_width(SupportOracle.from_cloud(pts, q, math.sqrt(q) * L), n_dirs, seed)
