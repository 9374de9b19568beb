"""Seeded point clouds from uniform measures on convex bodies and from
log-concave product measures.

Reference bodies are sampled exactly. Everything else goes through
hit-and-run, with chords found by ratio tests on a halfspace
representation where one exists and by bisection on the membership oracle
otherwise.
"""
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bodies as _b
from ._rng import check_seed, make_rng

__all__ = [
    "SampleCloud",
    "LogConcaveSpec",
    "sample_uniform",
    "sample_logconcave",
    "hit_and_run",
    "diagnostics",
    "save_cloud",
    "load_cloud",
    "save_cloud_csv",
]

_MAGIC = b"LQSC"
_HEADER = struct.Struct("<4sQQQ")

# stream ids, so that different uses of one master seed never collide
EXACT_STREAM = 0
CHAIN_STREAM = 1
LOGCONCAVE_STREAM = 2


@dataclass
class SampleCloud:
    """An ``N x n`` matrix of sample points with provenance."""

    points: np.ndarray
    seed: int
    source: object = None
    sampler: dict = field(default_factory=lambda: {"method": "exact"})

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be an N x n matrix")

    @property
    def N(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def with_points(self, points, **sampler_updates):
        sampler = dict(self.sampler, **sampler_updates)
        return SampleCloud(points, self.seed, self.source, sampler)


@dataclass(frozen=True)
class LogConcaveSpec:
    """A log-concave probability measure on R^n.

    ``family`` is one of ``"gaussian"`` (``params["cov"]``),
    ``"product_exponential"`` (``params["rates"]``, optional
    ``params["symmetric"]``) or ``"uniform_body"`` (``params["body"]``).

    Product exponential coordinates are centred and have variance
    ``1 / rate**2``: one-sided ``Exp(rate) - 1/rate`` by default, or the
    Laplace law with the same variance when ``symmetric`` is set.
    """

    family: str
    dim: int
    params: dict

    def __post_init__(self):
        if self.family == "gaussian":
            cov = np.asarray(self.params["cov"], dtype=float)
            if cov.shape != (self.dim, self.dim) or not np.allclose(cov, cov.T):
                raise ValueError("gaussian covariance must be a symmetric n x n matrix")
            if np.linalg.eigvalsh(cov).min() <= 0:
                raise ValueError("gaussian covariance must be positive definite")
        elif self.family == "product_exponential":
            rates = np.asarray(self.params["rates"], dtype=float)
            if rates.shape != (self.dim,) or not np.all(rates > 0) or not np.all(np.isfinite(rates)):
                raise ValueError("exponential rates must be n positive finite numbers")
        elif self.family == "uniform_body":
            if self.params["body"].dim != self.dim:
                raise ValueError("body dimension mismatch")
        else:
            raise ValueError(f"unsupported log-concave family {self.family!r}")

    @classmethod
    def gaussian(cls, cov):
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        return cls("gaussian", cov.shape[0], {"cov": cov})

    @classmethod
    def product_exponential(cls, rates, symmetric=False):
        rates = np.atleast_1d(np.asarray(rates, dtype=float))
        return cls("product_exponential", len(rates), {"rates": rates, "symmetric": bool(symmetric)})

    @classmethod
    def uniform_body(cls, body):
        return cls("uniform_body", body.dim, {"body": body})

    def to_spec(self):
        if self.family == "gaussian":
            return {"family": "gaussian", "dim": self.dim, "cov": self.params["cov"].tolist()}
        if self.family == "product_exponential":
            return {
                "family": "product_exponential",
                "dim": self.dim,
                "rates": self.params["rates"].tolist(),
                "symmetric": self.params.get("symmetric", False),
            }
        return {"family": "uniform_body", "dim": self.dim, "body": self.params["body"].to_spec()}

    @classmethod
    def from_spec(cls, spec):
        family = spec.get("family")
        if family == "gaussian":
            return cls.gaussian(spec["cov"])
        if family == "product_exponential":
            return cls.product_exponential(spec["rates"], spec.get("symmetric", False))
        if family == "uniform_body":
            return cls.uniform_body(_b.body_from_spec(spec["body"], "$.body"))
        raise ValueError(f"unsupported log-concave family {family!r}")


# -- exact samplers ------------------------------------------------------------

def _exact_sampler(body):
    if isinstance(body, _b.Ball):
        return _sample_ball
    if isinstance(body, _b.Cube):
        return _sample_cube
    if isinstance(body, _b.LpBall):
        return _sample_lp_ball
    if isinstance(body, _b.Simplex) or (
        isinstance(body, _b.VPolytope) and len(body.vertices) == body.dim + 1
    ):
        return _sample_simplex
    if isinstance(body, _b.LinearImage) and _exact_sampler(body.base) is not None:
        return _sample_linear_image
    return None


def _sample_ball(body, N, rng):
    g = rng.standard_normal((N, body.dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(N) ** (1.0 / body.dim)
    return body.radius * r[:, None] * g


def _sample_cube(body, N, rng):
    return (rng.random((N, body.dim)) - 0.5) * body.side


def _sample_lp_ball(body, N, rng):
    # Barthe-Guedon-Mendelson-Naor: g_i ~ exp(-|t|^p), W ~ Exp(1)
    n, p = body.dim, body.p
    if np.isinf(p):
        return (2 * rng.random((N, n)) - 1) * body.radius
    mag = rng.gamma(1.0 / p, 1.0, size=(N, n))
    signs = rng.choice([-1.0, 1.0], size=(N, n))
    g = signs * mag ** (1.0 / p)
    w = rng.exponential(1.0, size=N)
    denom = (mag.sum(axis=1) + w) ** (1.0 / p)
    return body.radius * g / denom[:, None]


def _sample_simplex(body, N, rng):
    e = rng.exponential(1.0, size=(N, body.dim + 1))
    w = e / e.sum(axis=1, keepdims=True)
    return w @ body.vertices


def _sample_linear_image(body, N, rng):
    base = _exact_sampler(body.base)(body.base, N, rng)
    return base @ body.T.T + body.shift


# -- hit-and-run -----------------------------------------------------------------

def hit_and_run(body, n_samples, rng, *, burn_in=None, thinning=None, start=None):
    """Run one hit-and-run chain and return the retained points.

    Parameters
    ----------
    body : ConvexBody
    n_samples : int
        Number of retained points.
    rng : numpy.random.Generator
    burn_in : int, optional
        Discarded steps; defaults to ``5 n^2``.
    thinning : int, optional
        Steps per retained point; defaults to ``n``.
    start : array_like, optional
        Interior starting point; defaults to ``body.interior_point()``.
    """
    n = body.dim
    burn_in = 5 * n * n if burn_in is None else int(burn_in)
    thinning = n if thinning is None else int(thinning)
    if thinning < 1 or burn_in < 0:
        raise ValueError("thinning must be >= 1 and burn_in >= 0")
    x = np.array(body.interior_point() if start is None else start, dtype=float)
    if not body.membership(x):
        raise ValueError("no interior starting point found for hit-and-run")

    H = None
    # the cross-polytope has 2^n facets; use its membership oracle instead
    if not (isinstance(body, _b.CrossPolytope) and n > 10):
        try:
            H = body.to_hpolytope()
        except NotImplementedError:
            pass

    total = burn_in + n_samples * thinning
    out = np.empty((n_samples, n))
    kept = 0
    block = 4096
    if H is not None:
        A = H.A
        slack = H.b - A @ x
    for s0 in range(0, total, block):
        m = min(block, total - s0)
        D = rng.standard_normal((m, n))
        D /= np.linalg.norm(D, axis=1, keepdims=True)
        U = rng.random(m)
        if H is not None:
            AD = D @ A.T
        for j in range(m):
            d = D[j]
            if H is not None:
                ad = AD[j]
                lo, hi = _b._interval_ratio(ad, slack)
                lam = lo + U[j] * (hi - lo)
                x = x + lam * d
                slack = slack - lam * ad
            else:
                lo, hi = body.chord(x, d)
                x = x + (lo + U[j] * (hi - lo)) * d
            step = s0 + j + 1
            if step > burn_in and (step - burn_in) % thinning == 0:
                out[kept] = x
                kept += 1
    return out


def sample_uniform(body, N, seed, *, method="auto", burn_in=None, thinning=None, chains=1, workers=1):
    """Draw ``N`` points from the uniform probability measure on ``body``.

    Exact samplers are used for balls, cubes, l_p balls, simplices and
    linear images of those; other bodies use hit-and-run. Chains are keyed
    by ``(seed, chain id)`` and concatenated in chain order, so the result
    does not depend on ``workers``.
    """
    seed = check_seed(seed)
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    exact = _exact_sampler(body)
    if method == "exact" and exact is None:
        raise ValueError(f"no exact sampler for {body!r}")
    if method not in ("auto", "exact", "hit_and_run"):
        raise ValueError(f"unknown sampling method {method!r}")
    if exact is not None and method != "hit_and_run":
        pts = exact(body, N, make_rng(seed, EXACT_STREAM))
        return SampleCloud(pts, seed, body, {"method": "exact"})

    n = body.dim
    burn_in = 5 * n * n if burn_in is None else int(burn_in)
    thinning = n if thinning is None else int(thinning)
    chains = int(chains)
    if chains < 1:
        raise ValueError("chains must be >= 1")
    sizes = [N // chains + (1 if c < N % chains else 0) for c in range(chains)]

    def run_chain(c):
        return hit_and_run(body, sizes[c], make_rng(seed, CHAIN_STREAM, c), burn_in=burn_in, thinning=thinning)

    if workers > 1 and chains > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chain, range(chains)))
    else:
        parts = [run_chain(c) for c in range(chains)]
    meta = {
        "method": "hit_and_run",
        "burn_in": burn_in,
        "thinning": thinning,
        "chains": chains,
        "chain_lengths": sizes,
    }
    return SampleCloud(np.vstack(parts), seed, body, meta)


def sample_logconcave(spec, N, seed):
    """I.i.d. samples from a :class:`LogConcaveSpec`."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    if spec.family == "uniform_body":
        cloud = sample_uniform(spec.params["body"], N, seed)
        cloud.source = spec
        return cloud
    rng = make_rng(check_seed(seed), LOGCONCAVE_STREAM)
    if spec.family == "gaussian":
        chol = np.linalg.cholesky(spec.params["cov"])
        pts = rng.standard_normal((N, spec.dim)) @ chol.T
    else:
        rates = spec.params["rates"]
        if spec.params.get("symmetric", False):
            pts = rng.laplace(0.0, 1.0 / math.sqrt(2.0), size=(N, spec.dim)) / rates
        else:
            pts = (rng.exponential(1.0, size=(N, spec.dim)) - 1.0) / rates
    return SampleCloud(pts, seed, spec, {"method": "exact"})


# -- diagnostics -------------------------------------------------------------------

def _lag1(X):
    Xc = X - X.mean(axis=0)
    denom = (Xc * Xc).sum(axis=0)
    num = (Xc[1:] * Xc[:-1]).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom > 0, num / denom, 0.0)


def diagnostics(cloud, autocorr_threshold=0.2):
    """Per-coordinate mean, variance and lag-1 autocorrelation.

    For hit-and-run clouds the autocorrelation is averaged over chains
    (weighted by chain length). Returns a dict with boolean flags
    ``high_autocorrelation`` and ``degenerate``.
    """
    X = cloud.points
    if len(X) < 100:
        raise ValueError("diagnostics need at least 100 points")
    lengths = cloud.sampler.get("chain_lengths") or [len(X)]
    rho = np.zeros(X.shape[1])
    offset = 0
    used = 0
    for m in lengths:
        if m >= 3:
            rho += m * _lag1(X[offset:offset + m])
            used += m
        offset += m
    rho /= max(used, 1)
    var = X.var(axis=0)
    ess = len(X) * np.clip((1 - rho) / (1 + rho), 1e-6, None)
    return {
        "N": len(X),
        "mean": X.mean(axis=0),
        "variance": var,
        "lag1_autocorrelation": rho,
        "effective_sample_size": np.minimum(ess, len(X) * 1.0),
        "high_autocorrelation": bool(np.abs(rho).max() > autocorr_threshold),
        "degenerate": bool(np.any(var == 0)),
    }


# -- persistence ---------------------------------------------------------------------

def save_cloud(path, cloud):
    """Write a little-endian float64 matrix with a (magic, dim, N, seed) header."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, cloud.dim, cloud.N, cloud.seed))
        fh.write(cloud.points.astype("<f8").tobytes())


def load_cloud(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError("truncated sample file")
        magic, dim, N, seed = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise ValueError("not a sample cloud file")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != dim * N:
        raise ValueError(f"expected {dim * N} values, found {data.size}")
    return SampleCloud(data.reshape(N, dim).astype(float), seed, None, {"method": "loaded"})


def save_cloud_csv(path, cloud):
    header = ",".join(f"x{i}" for i in range(cloud.dim))
    np.savetxt(path, cloud.points, delimiter=",", header=header, comments="", fmt="%.17g")
