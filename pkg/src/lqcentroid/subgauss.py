"""Almost-subgaussian directions from the hull of normalized centroid bodies.

With ``K_q = Z_q / (sqrt(q) L)`` the hull body is

    T = conv( K_2 / 1, K_4 / 2, ..., K_{2^s} / s ),    s = floor(log2 n),

so its support function is the maximum over levels ``i`` of
``||<., x>||_{2^i} / (i 2^{i/2} L)``. A direction where ``h_T`` is small
has L_q moments growing no faster than ``sqrt(q) log q``, which is what
:func:`find_direction` looks for and what :func:`moment_growth_check` and
:func:`tail_profile` certify.
"""
import hashlib
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._rng import make_rng
from .moments import (
    _points,
    default_q_grid,
    directional_moment,
    max_trusted_q,
    moment_profile,
    orlicz_norm,
    psi2_constant,
)

__all__ = [
    "TBodySpec",
    "SearchConfig",
    "DirectionReport",
    "TailProfile",
    "t_body",
    "t_support",
    "t_support_levels",
    "find_direction",
    "tail_profile",
    "moment_growth_check",
    "euclidean_moment",
    "euclidean_moment_ratio",
    "body_hash",
    "DEFAULT_T_GRID",
]

SEARCH_STREAM = 3
DEFAULT_T_GRID = tuple(np.round(np.arange(1.0, 8.0001, 0.25), 10))
_CHUNK = 1 << 23


class UntrustedOrderError(ValueError):
    pass


@dataclass
class TBodySpec:
    """Levels ``i = 1..s`` of the hull body over a normalized cloud."""

    points: np.ndarray
    L: float
    levels: tuple
    untrusted_levels: tuple = ()

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def scales(self):
        return np.array([1.0 / (i * 2 ** (i / 2) * self.L) for i in self.levels])


def t_body(cloud, L, *, trust="error"):
    """Set up the hull body for an isotropic (normalized) cloud.

    Parameters
    ----------
    cloud : SampleCloud or ndarray
    L : float
        Isotropic constant scale of the cloud (1 under the measure
        convention).
    trust : {"error", "flag"}
        What to do when a level's order ``2^i`` exceeds ``2 log N``.
    """
    X = _points(cloud)
    N, n = X.shape
    if n < 2:
        raise ValueError("the hull body needs dimension n >= 2")
    if not L > 0:
        raise ValueError("L must be positive")
    s = int(math.floor(math.log2(n)))
    levels = tuple(range(1, s + 1))
    limit = max_trusted_q(N)
    untrusted = tuple(i for i in levels if 2**i > limit)
    if untrusted and trust == "error":
        raise UntrustedOrderError(
            f"order q = {2 ** untrusted[0]} exceeds the trusted limit 2 log N = {limit:.1f}; "
            f"use N >= {math.ceil(math.exp(2 ** untrusted[-1] / 2)):d} points or a smaller dimension"
        )
    if trust not in ("error", "flag"):
        raise ValueError(f"unknown trust policy {trust!r}")
    return TBodySpec(X, float(L), levels, untrusted)


def _level_moments(X, D, levels, with_se=True):
    """Moments of orders ``2^i`` for each row of ``D``; repeated squaring.

    Returns arrays of shape ``(len(levels), len(D))`` for values and
    standard errors (zeros when ``with_se`` is false).
    """
    top = max(levels)
    vals = np.empty((len(levels), len(D)))
    ses = np.zeros_like(vals)
    N = len(X)
    ones = np.full(N, 1.0 / N)
    step = max(1, _CHUNK // max(N, 1))
    for s in range(0, len(D), step):
        P = X @ D[s:s + step].T
        A = P * P
        row = 0
        for i in range(1, top + 1):
            if i > 1:
                A *= A
            if i in levels:
                q = 2**i
                M = ones @ A
                vals[row, s:s + step] = M ** (1.0 / q)
                if with_se:
                    sd = A.std(axis=0, ddof=1)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        ses[row, s:s + step] = np.where(
                            M > 0, vals[row, s:s + step] / (q * M) * sd / math.sqrt(N), 0.0
                        )
                row += 1
    return vals, ses


def t_support_levels(spec, X, with_se=True):
    """Per-level scaled moments ``m_{2^i}(x) / (i 2^{i/2} L)`` and their SEs."""
    D = np.atleast_2d(np.asarray(X, dtype=float))
    if np.any(~np.any(D, axis=1)):
        raise ValueError("direction must be nonzero")
    vals, ses = _level_moments(spec.points, D, spec.levels, with_se)
    scale = spec.scales[:, None]
    return vals * scale, ses * scale


def t_support(spec, x):
    """Support function of the hull body at ``x`` (scalar for one vector)."""
    x = np.asarray(x, dtype=float)
    vals, _ = t_support_levels(spec, x)
    out = vals.max(axis=0)
    return float(out[0]) if x.ndim == 1 else out


@dataclass
class SearchConfig:
    """Multi-start pattern search settings on the unit sphere."""

    starts: int = 64
    initial_step: float = 0.5
    step_tol: float = 1e-6
    max_iter: int = 10_000
    seed: int = 0
    probes: tuple = ()
    trust: str = "error"
    workers: int = 1
    t_grid: tuple = DEFAULT_T_GRID


@dataclass
class TailProfile:
    rows: list
    fitted_c: float
    tau: int = 2

    def to_csv(self):
        lines = ["t,tail,exceedances,bound,used"]
        for r in self.rows:
            lines.append(f"{r['t']!r},{r['tail']!r},{r['exceedances']},{r['bound']!r},{int(r['used'])}")
        return "\n".join(lines) + "\n"


@dataclass
class DirectionReport:
    theta: np.ndarray
    objective: float
    objective_se: float
    level_values: list
    psi2_proxy: float
    psi2_orlicz_ratio: float
    growth_constant: float
    growth_table: list
    tail_table: list
    fitted_c: float
    tau: int = 2
    log_convention: str = "natural log of (q + 1)"
    seed: int = 0
    N: int = 0
    body_hash: str = ""
    improved: bool = True
    untrusted_levels: list = field(default_factory=list)
    starts: int = 0

    def to_dict(self):
        d = asdict(self)
        d["theta"] = [float(v) for v in self.theta]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=float)


def body_hash(source):
    """Stable hash of a body or log-concave spec description."""
    if source is None or not hasattr(source, "to_spec"):
        return ""
    text = json.dumps(source.to_spec(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _tangent_basis(theta):
    """Columns spanning ``theta^perp`` from a Householder reflection."""
    n = len(theta)
    e = np.zeros(n)
    e[0] = 1.0
    v = theta - e if theta[0] < 0 else theta + e
    v /= np.linalg.norm(v)
    H = np.eye(n) - 2.0 * np.outer(v, v)
    return H[:, 1:]


def _canonical(theta):
    theta = theta / np.linalg.norm(theta)
    nz = np.flatnonzero(np.abs(theta) > 1e-12)
    if len(nz) and theta[nz[0]] < 0:
        theta = -theta
    return theta


def _pattern_search(objective, theta, cfg):
    f = objective(theta[None, :])[0]
    step = cfg.initial_step
    improved = False
    it = 0
    while step >= cfg.step_tol and it < cfg.max_iter:
        B = _tangent_basis(theta)
        cand = np.vstack([theta + step * B.T, theta - step * B.T])
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        fc = objective(cand)
        j = int(np.argmin(fc))
        # ignore round-off sized gains
        if fc[j] < f - 1e-12 * abs(f):
            theta, f = cand[j], fc[j]
            improved = True
        else:
            step *= 0.5
        it += 1
    return theta, f, improved


def find_direction(cloud, L, search_config=None, *, q_max=None):
    """Minimize the hull-body support function over the unit sphere.

    Parameters
    ----------
    cloud : SampleCloud
        Normalized (isotropic) cloud; all evaluations reuse it.
    L : float
        Isotropic constant scale of the cloud.
    search_config : SearchConfig, optional
    q_max : float, optional
        Largest order for the growth check; see :func:`moment_growth_check`.

    Returns
    -------
    DirectionReport
    """
    cfg = search_config or SearchConfig()
    spec = t_body(cloud, L, trust=cfg.trust)
    n = spec.dim

    def objective(D):
        vals, _ = t_support_levels(spec, D, with_se=False)
        return vals.max(axis=0)

    starts = []
    for k in range(cfg.starts):
        g = make_rng(cfg.seed, SEARCH_STREAM, k).standard_normal(n)
        starts.append(g / np.linalg.norm(g))
    for p in cfg.probes:
        p = np.asarray(p, dtype=float)
        starts.append(p / np.linalg.norm(p))
    if not starts:
        raise ValueError("search needs at least one start")

    def run(theta0):
        return _pattern_search(objective, theta0, cfg)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]

    best_f = min(r[1] for r in results)
    tied = [_canonical(r[0]) for r in results if r[1] <= best_f + 1e-12 * abs(best_f)]
    theta = min(tied, key=lambda t: tuple(t))
    any_improved = any(r[2] for r in results)
    if not any_improved:
        warnings.warn("no search start improved on its initial direction", RuntimeWarning)

    level_vals, level_ses = t_support_levels(spec, theta)
    top = int(np.argmax(level_vals[:, 0]))
    objective_value = float(level_vals[top, 0])

    X = spec.points
    profile = moment_profile(X, theta, [q for q in default_q_grid(n) if q <= max_trusted_q(len(X))])
    m1 = profile.value(1)
    growth, growth_table = moment_growth_check(X, theta, q_max)
    tails = tail_profile(X, theta, cfg.t_grid)
    source = getattr(cloud, "source", None)
    return DirectionReport(
        theta=theta,
        objective=objective_value,
        objective_se=float(level_ses[top, 0]),
        level_values=[
            {"level": i, "q": 2**i, "value": float(v), "se": float(e)}
            for i, v, e in zip(spec.levels, level_vals[:, 0], level_ses[:, 0])
        ],
        psi2_proxy=psi2_constant(profile),
        psi2_orlicz_ratio=orlicz_norm(X, theta, 2.0) / m1,
        growth_constant=growth,
        growth_table=growth_table,
        tail_table=tails.rows,
        fitted_c=tails.fitted_c,
        seed=int(getattr(cloud, "seed", cfg.seed)),
        N=len(X),
        body_hash=body_hash(source),
        improved=any_improved,
        untrusted_levels=[2**i for i in spec.untrusted_levels],
        starts=len(starts),
    )


def tail_profile(cloud, theta, t_grid=DEFAULT_T_GRID, min_exceedances=10):
    """Empirical tails ``P(|<y, theta>| >= t m_1)`` and the fitted constant.

    The constant is ``c = min_t -log(tail) log^2(t + 1) / t^2`` over grid
    points with at least ``min_exceedances`` exceedances, so that
    ``tail <= exp(-c t^2 / log^2(t + 1))`` holds on those points.
    """
    theta = np.asarray(theta, dtype=float)
    p = np.abs(_points(cloud) @ theta)
    N = len(p)
    m1 = p.mean()
    if m1 <= 1e-300:
        raise ValueError("first moment vanishes: degenerate direction")
    p_sorted = np.sort(p)
    t_grid = np.asarray(sorted(t_grid), dtype=float)
    if np.any(t_grid < 1):
        raise ValueError("tail grid must lie in [1, inf)")
    counts = N - np.searchsorted(p_sorted, t_grid * m1, side="left")
    tails = counts / N
    used = (counts >= min_exceedances) & (counts < N)
    with np.errstate(divide="ignore"):
        cs = -np.log(tails) * np.log(t_grid + 1) ** 2 / t_grid**2
    fitted = float(cs[used].min()) if used.any() else float("nan")
    bound = np.exp(-fitted * t_grid**2 / np.log(t_grid + 1) ** 2) if used.any() else np.full(len(t_grid), np.nan)
    rows = [
        {"t": float(t), "tail": float(tl), "exceedances": int(c), "bound": float(b), "used": bool(u)}
        for t, tl, c, b, u in zip(t_grid, tails, counts, bound, used)
    ]
    return TailProfile(rows, fitted)


def moment_growth_check(cloud, theta, q_max=None):
    """``sup_q m_q / (sqrt(q) log(q + 1) m_2)`` over dyadic ``q in [2, q_max]``.

    ``q_max`` defaults to the largest power of two not exceeding
    ``min(n, 2 log N)``; an explicit value may exceed ``n`` but not the
    trusted limit ``2 log N``.

    Returns
    -------
    growth_constant : float
    table : list of dict
        ``q``, ``value``, ``se`` and ``ratio`` for each order.
    """
    X = _points(cloud)
    N, n = X.shape
    limit = max_trusted_q(N)
    if q_max is None:
        q_max = 2 ** int(math.floor(math.log2(max(2, min(n, limit)))))
    if q_max > limit:
        raise ValueError(f"q_max = {q_max} exceeds the trusted limit 2 log N = {limit:.1f}")
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    m2, _ = directional_moment(X, theta, 2)
    if m2 <= 1e-300:
        raise ValueError("second moment vanishes: degenerate direction")
    table = []
    q = 2
    while q <= q_max:
        v, e = directional_moment(X, theta, q)
        table.append({"q": q, "value": v, "se": e, "ratio": v / (math.sqrt(q) * math.log(q + 1) * m2)})
        q *= 2
    return max(r["ratio"] for r in table), table


def euclidean_moment(cloud, q):
    """``(E ||y||_2^q)^{1/q}`` with a delta-method standard error."""
    X = _points(cloud)
    if q > max_trusted_q(len(X)):
        raise ValueError(f"q = {q} exceeds the trusted limit 2 log N")
    r = np.linalg.norm(X, axis=1)
    A = r**q
    M = A.mean()
    v = M ** (1.0 / q)
    se = v / (q * M) * A.std(ddof=1) / math.sqrt(len(A)) if M > 0 else 0.0
    return float(v), float(se)


def euclidean_moment_ratio(cloud, q, L):
    """``(E ||y||^q)^{1/q} / (sqrt(n) L)`` and its standard error."""
    v, se = euclidean_moment(cloud, q)
    scale = math.sqrt(_points(cloud).shape[1]) * L
    return v / scale, se / scale
