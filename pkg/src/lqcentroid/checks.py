"""Geometry checks that emit verification records.

Each function runs one desk-scale check and returns a list of records
``{check, inputs_hash, lhs, rhs, gap, se, pass}`` (see
:func:`lqcentroid.geom.record`). Checks that need a body take one; the
others run on a fixed low-dimensional case.
"""
import math
import warnings

import numpy as np

from . import bodies as B
from .geom import (
    covering_number,
    hull_cover_net,
    kq_body,
    kq_mean_width,
    lyz_check,
    prop21_identity_check,
    quermassintegrals,
    record,
    segment_net,
    volumetric_check,
)
from .geom.quermass import kubota, polytope_vertices
from .moments import isotropize
from .sampler import sample_uniform

__all__ = ["GEOM_CHECKS", "run_geom_check", "rotation"]

GEOM_CHECKS = ("meanwidth", "lyz", "prop21", "covering", "quermass", "hullnet")


def rotation(n, seed):
    """A random rotation of ``R^n`` (QR of a Gaussian matrix with sign fix)."""
    from ._rng import make_rng

    G = make_rng(seed, 8).standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def _spec(body):
    return B.body_to_spec(body) if body is not None else None


def check_meanwidth(body, N=100_000, seed=0, n_dirs=400, max_q=None):
    """``w(K_q)`` for ``q <= sqrt(n)`` on the isotropized body, bounded by 2.5."""
    n = body.dim
    _, iso = isotropize(sample_uniform(body, N, seed))
    top = max_q or max(1, int(math.isqrt(n)))
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for q in range(1, top + 1):
            w, se = kq_mean_width(iso, 1.0, q, n_dirs, seed)
            out.append(record("meanwidth", {"body": _spec(body), "N": N, "seed": seed, "q": q}, w, 2.5, se, w <= 2.5, q=q))
    return out


def check_lyz(body, qs=(1, 2), N=200_000, seed=0):
    """LYZ ratio of the volume-one dilate of a planar or spatial body."""
    K = B.normalized(body)
    cloud = sample_uniform(K, N, seed)
    out = []
    for q in qs:
        r = lyz_check(cloud, q)
        ok = r["ratio"] >= 1 - 2 * r["se"]
        out.append(
            record(
                "lyz",
                {"body": _spec(body), "N": N, "seed": seed, "q": q},
                r["ratio"],
                1.0,
                r["se"],
                ok,
                q=q,
                ratio_inner=r["ratio_inner"],
                ratio_outer=r["ratio_outer"],
            )
        )
    return out


def check_prop21(body, theta=None, qs=(1, 2, 3), method="exact", N=200_000, seed=0):
    """Both sides of the projection identity for ``k = 1``."""
    K = B.normalized(body)
    theta = np.eye(K.dim)[0] if theta is None else np.asarray(theta, dtype=float)
    out = []
    for q in qs:
        r = prop21_identity_check(K, theta, q, method=method, N=N, seed=seed)
        ok = r["gap"] <= 1e-10 * max(1.0, abs(r["lhs"])) if method == "exact" else r["gap"] <= 3 * r["se"]
        out.append(
            record(
                "prop21",
                {"body": _spec(body), "theta": theta, "q": q, "method": method, "N": N, "seed": seed},
                r["lhs"],
                r["rhs"],
                "exact" if method == "exact" else r["se"],
                ok,
                q=q,
                ball_length=r["ball_length"],
            )
        )
    return out


def covering_profile(body, q, ts=(0.1, 0.15, 0.2, 0.3, 0.5, 0.75, 1.0), N=200_000, seed=0, n_subspaces=500):
    """Covering numbers ``N(K_q, 2t)`` of the empirical ``K_q`` of a body in R^3."""
    _, iso = isotropize(sample_uniform(body, N, seed))
    K = kq_body(iso, q, 1.0)
    vol = K.volume_exact()
    W, _ = kubota(polytope_vertices(K), n_subspaces, seed)
    ball = B.unit_ball_volume(3)

    def offset(t):
        return vol + 3 * W[0] * t + 3 * W[1] * t * t + ball * t**3

    ts = np.asarray(ts, dtype=float)
    res = covering_number(K, 2 * ts)
    vol_rows = volumetric_check(res, 3, offset)
    shape = [math.log(c) * min(t, math.sqrt(t)) for c, t in zip(res.cover, ts)]
    return {
        "t": ts,
        "cover": res.cover,
        "packing": res.packing,
        "volumetric": vol_rows,
        "shape": np.array(shape),
        "shape_bound": math.sqrt(3 * q) + 3,
        "resolution": res.resolution,
    }


def check_covering(body, qs=(2, 4), N=200_000, seed=0):
    out = []
    for q in qs:
        p = covering_profile(body, q, N=N, seed=seed)
        inputs = {"body": _spec(body), "q": q, "N": N, "seed": seed}
        mono = bool(np.all(np.diff(p["cover"]) <= 0))
        out.append(record("covering_monotone", inputs, None, None, "exact", mono, q=q, cover=p["cover"]))
        lower = all(r["lower_ok"] for r in p["volumetric"])
        offset = all(r["offset_ok"] for r in p["volumetric"])
        out.append(record("covering_volumetric", inputs, None, None, "exact", lower and offset, q=q))
        worst = float(p["shape"].max())
        out.append(record("covering_shape", inputs, worst, p["shape_bound"], "exact", worst <= p["shape_bound"], q=q))
    return out


def check_quermass(body, seed=0, n_subspaces=2000):
    r = quermassintegrals(body, n_subspaces=n_subspaces, seed=seed)
    n = body.dim
    return [
        record(
            "quermass",
            {"body": _spec(body), "seed": seed, "j": j},
            float(r["steiner"][j]),
            float(r["kubota"][j - 1]),
            math.hypot(float(r["steiner_se"][j]), float(r["kubota_se"][j - 1])),
            r["rel_gap"][j - 1] <= 0.05,
            j=j,
            method=r["method"],
        )
        for j in range(1, n)
    ]


def hull_segments(n=4, s=3, seed=0, length=0.9):
    """``s`` random segments with both endpoints at distance ``length`` from 0."""
    from ._rng import make_rng

    rng = make_rng(seed, 9)
    segs = []
    for _ in range(s):
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        a *= length / np.linalg.norm(a)
        b *= length / np.linalg.norm(b)
        segs.append(np.array([a, b]))
    return segs


def check_hullnet(n=4, s=3, R=1.0, t=0.25, n_samples=10_000, seed=0):
    segs = hull_segments(n, s, seed)
    nets = [segment_net(a, b, t) for a, b in segs]
    inputs = {"n": n, "s": s, "R": R, "t": t, "n_samples": n_samples, "seed": seed}
    try:
        h = hull_cover_net(nets, R, t, segs, n_samples, seed)
    except ValueError as exc:
        witness = getattr(exc, "witness", None)
        return [record("hullnet", inputs, getattr(exc, "distance", None), 2 * t, "exact", False, witness=witness, error=str(exc))]
    return [
        record(
            "hullnet",
            inputs,
            h.max_distance,
            2 * t,
            "exact",
            h.violations == 0,
            net_size=len(h.points),
            constant=h.constant,
            violations=h.violations,
        )
    ]


def run_geom_check(name, body=None, seed=0, N=None):
    """Run one named geometry check; a default body is used when none fits."""
    if name not in GEOM_CHECKS:
        raise ValueError(f"unknown geometry check {name!r}; choose from {', '.join(GEOM_CHECKS)}")
    kw = {} if N is None else {"N": N}
    if name == "meanwidth":
        return check_meanwidth(body or B.Cube(9), seed=seed, **kw)
    if name == "lyz":
        K = body if body is not None and body.dim in (2, 3) else B.Cube(2)
        return check_lyz(K, seed=seed, **kw)
    if name == "prop21":
        K = body if body is not None and body.dim <= 4 else B.Cube(2)
        return check_prop21(K.to_hpolytope(), seed=seed)
    if name == "covering":
        K = body if body is not None and body.dim == 3 else B.Cube(3)
        return check_covering(K, seed=seed, **kw)
    if name == "quermass":
        K = body if body is not None and body.dim in (2, 3) else B.Cube(2)
        return check_quermass(K, seed=seed)
    return check_hullnet(seed=seed)
