"""Directional L_q moments, isotropic normalization and Orlicz norms.

The support function of the L_q-centroid body ``Z_q`` of a probability
measure in direction ``x`` is the L_q norm of ``y -> <y, x>``; every
estimator here works on a sample cloud of that measure.

Two normalization conventions are supported:

``"measure"``
    the probability measure is put in isotropic position, ``Cov = I``,
    and the isotropic constant scale is ``L = 1``. Needs no volume.
``"body"``
    the body is mapped to volume one with ``Cov = L_K^2 I``; needs the
    volume of the source body.

Both give the same normalized centroid bodies ``Z_q / (sqrt(q) L)``.
"""
import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from . import bodies as _b
from .sampler import SampleCloud, sample_uniform

__all__ = [
    "IsotropicModel",
    "MomentProfile",
    "isotropize",
    "isotropic_constant",
    "exact_covariance",
    "directional_moment",
    "directional_moments",
    "moment_profile",
    "orlicz_norm",
    "psi2_constant",
    "psi1_borell_report",
    "default_q_grid",
    "max_trusted_q",
]

_CHUNK = 1 << 22  # entries of the projection matrix evaluated at once


def _points(cloud):
    if isinstance(cloud, SampleCloud):
        return cloud.points
    return np.atleast_2d(np.asarray(cloud, dtype=float))


def max_trusted_q(N):
    """Largest order whose empirical moment is not dominated by a few extremes."""
    return 2.0 * math.log(N)


def default_q_grid(n):
    """Dyadic orders ``1, 2, 4, ..., 2^floor(log2 n)`` together with 3."""
    top = max(int(math.floor(math.log2(n))), 1)
    return sorted({1, 3} | {2**i for i in range(1, top + 1)})


@dataclass
class IsotropicModel:
    """Affine normalization ``y -> map @ (y - shift)``."""

    shift: np.ndarray
    map: np.ndarray
    L: float
    convention: str

    def apply(self, Y):
        return (np.asarray(Y, dtype=float) - self.shift) @ self.map.T

    def to_json(self):
        return json.dumps(
            {
                "shift": self.shift.tolist(),
                "map": self.map.tolist(),
                "L": self.L,
                "convention": self.convention,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(np.array(d["shift"]), np.array(d["map"]), float(d["L"]), d["convention"])


def _source_volume(cloud):
    source = getattr(cloud, "source", None)
    if isinstance(source, _b.ConvexBody):
        try:
            return source.volume_exact()
        except (NotImplementedError, ValueError):
            return None
    return None


def isotropize(cloud, convention="measure", volume=None):
    """Fit the isotropic normalization of a cloud and apply it.

    Parameters
    ----------
    cloud : SampleCloud
    convention : {"measure", "body"}
    volume : float, optional
        Volume of the source body for the body convention. Taken from
        ``cloud.source`` when it has an exact volume.

    Returns
    -------
    model : IsotropicModel
    normalized : SampleCloud
        The cloud pushed through the model. Its empirical mean is zero and
        its empirical covariance is ``I`` (measure) or ``L^2 I`` (body).
    """
    X = _points(cloud)
    N, n = X.shape
    if N < 10 * n * n:
        raise ValueError(f"isotropize needs N >= 10 n^2 = {10 * n * n} points, got {N}")
    if convention not in ("measure", "body"):
        raise ValueError(f"unknown convention {convention!r}")
    shift = X.mean(axis=0)
    Xc = X - shift
    cov = Xc.T @ Xc / N
    w, V = np.linalg.eigh(cov)
    if w.min() <= 1e-12 * max(w.max(), 1e-300):
        raise ValueError("sample covariance is singular")
    inv_sqrt = (V / np.sqrt(w)) @ V.T
    if convention == "body":
        volume = _source_volume(cloud) if volume is None else volume
        if volume is None:
            raise ValueError("body convention needs the volume of the source body")
        L = math.exp(0.5 * np.log(w).sum() / n) / volume ** (1.0 / n)
    else:
        L = 1.0
    model = IsotropicModel(shift, L * inv_sqrt, L, convention)
    pts = Xc @ model.map.T
    if isinstance(cloud, SampleCloud):
        normalized = cloud.with_points(pts, normalized=convention)
    else:
        normalized = SampleCloud(pts, 0, None, {"method": "array", "normalized": convention})
    return model, normalized


def exact_covariance(body):
    """Covariance of the uniform measure for bodies where it has a closed form.

    Returns ``None`` when no closed form is implemented.
    """
    n = body.dim
    if isinstance(body, _b.Ball):
        return body.radius**2 / (n + 2) * np.eye(n)
    if isinstance(body, _b.Cube):
        return body.side**2 / 12.0 * np.eye(n)
    if isinstance(body, _b.CrossPolytope):
        return 2 * body.radius**2 / ((n + 1) * (n + 2)) * np.eye(n)
    if isinstance(body, _b.VPolytope) and len(body.vertices) == n + 1:
        V = body.vertices
        mu = V.mean(axis=0)
        second = (V.T @ V + np.outer(V.sum(axis=0), V.sum(axis=0))) / ((n + 1) * (n + 2))
        return second - np.outer(mu, mu)
    if isinstance(body, _b.LinearImage):
        base = exact_covariance(body.base)
        return None if base is None else body.T @ base @ body.T.T
    return None


def isotropic_constant(body, cloud=None, *, N=200_000, seed=0, volume=None):
    """Isotropic constant ``L_K = det(Cov)^{1/(2n)} / |K|^{1/n}``.

    Uses the closed-form covariance when available (standard error 0),
    otherwise the sample covariance of ``cloud`` or of a fresh uniform
    sample; the standard error then comes from a 20-block jackknife.

    Returns
    -------
    (value, se) : tuple of float
    """
    n = body.dim
    if volume is None:
        try:
            volume = body.volume_exact()
        except (NotImplementedError, ValueError):
            raise ValueError("isotropic_constant needs the body volume") from None
    cov = exact_covariance(body) if cloud is None else None
    if cov is not None:
        sign, logdet = np.linalg.slogdet(cov)
        return math.exp(logdet / (2 * n)) / volume ** (1.0 / n), 0.0

    X = _points(cloud if cloud is not None else sample_uniform(body, N, seed))

    def estimate(Y):
        sign, logdet = np.linalg.slogdet(np.cov(Y, rowvar=False, bias=True).reshape(n, n))
        return math.exp(logdet / (2 * n)) / volume ** (1.0 / n)

    value = estimate(X)
    blocks = np.array_split(np.arange(len(X)), 20)
    loo = np.array([estimate(np.delete(X, idx, axis=0)) for idx in blocks])
    g = len(blocks)
    se = math.sqrt((g - 1) / g * ((loo - loo.mean()) ** 2).sum())
    return value, se


# -- directional moments -----------------------------------------------------

def _moment_stats(P, q, jackknife_share=0.05, blocks=20):
    """q-norm and its standard error for each column of the projection matrix."""
    A = np.abs(P) ** q
    N = len(A)
    M = A.mean(axis=0)
    sd = A.std(axis=0, ddof=1) if N > 1 else np.zeros(A.shape[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        values = M ** (1.0 / q)
        se = np.where(M > 0, values / (q * M) * sd / math.sqrt(max(N, 1)), 0.0)
        # a single term dominating the 2q-th moment means the delta method is unreliable
        sq = (A * A).sum(axis=0)
        unstable = np.where(sq > 0, (A * A).max(axis=0) / sq, 0.0) > jackknife_share
    if np.any(unstable) and N >= 2 * blocks:
        idx = np.array_split(np.arange(N), blocks)
        sums = np.array([A[i].sum(axis=0) for i in idx])
        counts = np.array([len(i) for i in idx])[:, None]
        loo = ((A.sum(axis=0) - sums) / (N - counts)) ** (1.0 / q)
        jk = np.sqrt((blocks - 1) / blocks * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
        se = np.where(unstable, np.maximum(se, jk), se)
    return values, se


def directional_moments(cloud, directions, q):
    """Vectorized :func:`directional_moment` over the rows of ``directions``.

    Returns
    -------
    values, se : ndarray
    """
    X = _points(cloud)
    D = np.atleast_2d(np.asarray(directions, dtype=float))
    if q < 1:
        raise ValueError("moment order q must be >= 1")
    if np.any(np.linalg.norm(D, axis=1) == 0):
        raise ValueError("direction must be nonzero")
    step = max(1, _CHUNK // max(len(X), 1))
    vals, ses = [], []
    for s in range(0, len(D), step):
        v, e = _moment_stats(X @ D[s:s + step].T, q)
        vals.append(v)
        ses.append(e)
    return np.concatenate(vals), np.concatenate(ses)


def directional_moment(cloud, x, q):
    """Empirical ``(E |<y, x>|^q)^{1/q}`` with a delta-method standard error.

    Parameters
    ----------
    cloud : SampleCloud or array_like
    x : array_like
        Nonzero direction (need not be unit length).
    q : float
        Order, ``q >= 1``.

    Returns
    -------
    (value, se) : tuple of float
    """
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("direction must be nonzero")
    v, e = directional_moments(cloud, x[None, :], q)
    return float(v[0]), float(e[0])


@dataclass
class MomentProfile:
    """Directional moments on a grid of orders."""

    q_grid: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    direction: np.ndarray
    trusted: np.ndarray

    def value(self, q):
        idx = np.flatnonzero(np.isclose(self.q_grid, q))
        if not len(idx):
            raise KeyError(f"order {q} not in profile")
        return float(self.values[idx[0]])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "value", "se", "trusted"])
        for q, v, e, t in zip(self.q_grid, self.values, self.std_errors, self.trusted):
            w.writerow([f"{q:g}", repr(float(v)), repr(float(e)), int(t)])
        return buf.getvalue()


def moment_profile(cloud, x, q_grid=None):
    X = _points(cloud)
    x = np.asarray(x, dtype=float)
    q_grid = np.asarray(default_q_grid(X.shape[1]) if q_grid is None else sorted(q_grid), dtype=float)
    p = X @ x
    vals, ses = [], []
    for q in q_grid:
        if q < 1:
            raise ValueError("moment order q must be >= 1")
        v, e = _moment_stats(p[:, None], q)
        vals.append(v[0])
        ses.append(e[0])
    trusted = q_grid <= max_trusted_q(len(X))
    return MomentProfile(q_grid, np.array(vals), np.array(ses), x / np.linalg.norm(x), trusted)


def orlicz_norm(cloud, x, alpha):
    """Empirical psi_alpha Orlicz norm of ``y -> <y, x>``, ``psi(t) = exp(t^alpha) - 1``.

    Solves ``mean(exp((|<y,x>|/t)^alpha)) = 2`` by bisection on
    ``[max|f|/50, 50 max|f|]`` to relative tolerance 1e-8.
    """
    if not 1 <= alpha <= 2:
        raise ValueError("alpha must lie in [1, 2]")
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("direction must be nonzero")
    f = np.abs(_points(cloud) @ x)
    top = f.max()
    if top == 0:
        raise ValueError("all samples project to zero")
    log2 = math.log(2.0)
    logN = math.log(len(f))

    def excess(t):
        z = (f / t) ** alpha
        zmax = z.max()
        return zmax + math.log(np.exp(z - zmax).sum()) - logN - log2

    lo, hi = top / 50.0, 50.0 * top
    g_lo, g_hi = excess(lo), excess(hi)
    if not (g_lo > 0 > g_hi):
        raise ValueError(
            f"no sign change on [{lo:.3g}, {hi:.3g}]: excess {g_lo:.3g} and {g_hi:.3g}"
        )
    return bisect(excess, lo, hi, rtol=1e-8, xtol=1e-300, maxiter=500)


def psi2_constant(profile):
    """``max_q m_q / (sqrt(q) m_1)`` over the profile grid."""
    m1 = _first_moment(profile)
    return float(np.max(profile.values / (np.sqrt(profile.q_grid) * m1)))


def psi1_borell_report(profile):
    """``max_q m_q / (q m_1)``; bounded by an absolute constant for every direction."""
    m1 = _first_moment(profile)
    return float(np.max(profile.values / (profile.q_grid * m1)))


def _first_moment(profile):
    m1 = profile.value(1)
    if m1 <= 1e-300 or m1 <= 1e-12 * profile.values.max():
        raise ValueError("first moment vanishes: degenerate direction")
    return m1
