"""Ball bodies ``B_q(K, F)`` and the projection identity for ``Z_q``.

For a subspace ``F`` with orthogonal complement ``E`` and a direction
``phi`` in ``F`` the half-subspace ``E(phi)`` is
``{y in span(E, phi) : <y, phi> >= 0}``. The function

    phi -> |phi|^{1 + q/(q+1)} ( int_{K ∩ E(phi)} |<y, phi>|^q dy )^{-1/(q+1)}

is the gauge of a convex body in ``F``. Integrals over the half-slices are
computed exactly by triangulation, or by Monte Carlo from a uniform cloud
of ``K`` when ``dim F = 1``.
"""
import math

import numpy as np

from ..bodies import SubspaceBasis, slice_subspace
from ..moments import directional_moment
from ..sampler import sample_uniform
from .integrals import polytope_power_integral

__all__ = [
    "half_slice_moment",
    "ball_body_gauge",
    "ball_body_volume",
    "prop21_identity_check",
]


def _as_basis(F):
    if isinstance(F, SubspaceBasis):
        return F
    return SubspaceBasis(np.atleast_2d(np.asarray(F, dtype=float)))


def half_slice_moment(K, F, q, phi):
    """``int_{K ∩ E(phi)} |<y, phi>|^q dy`` (Lebesgue measure of ``span(E, phi)``)."""
    F = _as_basis(F)
    phi = np.asarray(phi, dtype=float)
    norm = np.linalg.norm(phi)
    if norm == 0:
        raise ValueError("phi must be nonzero")
    if np.linalg.norm(phi - F.columns @ (F.columns.T @ phi)) > 1e-9 * norm:
        raise ValueError("phi must lie in F")
    u = phi / norm
    cols = [u] if F.k == F.n else [F.complement().columns, u[:, None]]
    U = SubspaceBasis(np.column_stack(cols))
    sliced = slice_subspace(K, U)
    axis = np.zeros(U.k)
    axis[-1] = 1.0
    try:
        value = polytope_power_integral(sliced, axis, q, side=1)
    except ValueError:
        raise ValueError("empty half-slice: phi does not enter the body") from None
    return norm**q * value


def ball_body_gauge(K, F, q, phi):
    """Gauge of ``B_q(K, F)`` at ``phi``; homogeneous of degree one."""
    phi = np.asarray(phi, dtype=float)
    norm = np.linalg.norm(phi)
    integral = half_slice_moment(K, F, q, phi)
    return norm ** (1 + q / (q + 1)) * integral ** (-1.0 / (q + 1))


def ball_body_volume(K, F, q, n_grid=256):
    """Volume of ``B_q(K, F)`` for ``dim F`` in {1, 2} by quadrature over ``S_F``.

    For ``k = 1`` the two-point sphere is exact and the body is the interval
    ``[-r_minus, r_plus]``; for ``k = 2`` a uniform angular grid is used and
    cross-checked against the area of the inscribed radial polygon.

    Returns
    -------
    dict
        ``volume``, ``radii`` (per grid direction), ``cross_check`` and for
        ``k = 1`` also ``r_plus`` and ``r_minus``.
    """
    F = _as_basis(F)
    k = F.k
    if k == 1:
        u = F.columns[:, 0]
        r_plus = half_slice_moment(K, F, q, u) ** (1.0 / (q + 1))
        r_minus = half_slice_moment(K, F, q, -u) ** (1.0 / (q + 1))
        volume = r_plus + r_minus
        by_gauge = 1.0 / ball_body_gauge(K, F, q, u) + 1.0 / ball_body_gauge(K, F, q, -u)
        if abs(volume - by_gauge) > 1e-9 * volume:
            raise ValueError("ball body length disagrees with the gauge-based length")
        return {
            "volume": volume,
            "r_plus": r_plus,
            "r_minus": r_minus,
            "radii": np.array([r_plus, r_minus]),
            "cross_check": by_gauge,
        }
    if k == 2:
        angles = 2 * np.pi * np.arange(n_grid) / n_grid
        dirs = np.cos(angles)[:, None] * F.columns[:, 0] + np.sin(angles)[:, None] * F.columns[:, 1]
        radii = np.array([half_slice_moment(K, F, q, d) ** (1.0 / (q + 1)) for d in dirs])
        volume = math.pi * np.mean(radii**2)
        polygon = 0.5 * math.sin(2 * np.pi / n_grid) * np.sum(radii * np.roll(radii, -1))
        if abs(volume - polygon) > 1e-2 * volume:
            raise ValueError("ball body quadrature disagrees with the radial polygon area")
        return {"volume": volume, "radii": radii, "cross_check": polygon}
    raise ValueError("ball body volumes are implemented for dim F in {1, 2}")


def _interval_zq(a, b, q):
    """Support of ``Z_q`` of the interval ``[-b, a]`` in the positive direction."""
    return ((a ** (q + 1) + b ** (q + 1)) / (q + 1)) ** (1.0 / q)


def _assemble_rhs(I_plus, I_minus, q):
    r_plus = I_plus ** (1.0 / (q + 1))
    r_minus = I_minus ** (1.0 / (q + 1))
    length = r_plus + r_minus
    z_bar = _interval_zq(r_plus / length, r_minus / length, q)
    return (1 + q) ** (1.0 / q) * length ** (1 + 1.0 / q) * z_bar, length


def prop21_identity_check(K, theta, q, method="exact", N=200_000, seed=0):
    """Compare both sides of ``P_F Z_q(K) = (k+q)^{1/q} |B|^{1/k+1/q} Z_q(B̄)`` for k = 1.

    ``F = span(theta)`` and ``B = B_{k+q-1}(K, F)`` which for ``k = 1`` is
    ``B_q(K, F)``. Both sides are symmetric intervals in ``F``; their
    half-lengths are compared.

    ``method="exact"`` integrates over the polytope ``K``; ``method="mc"``
    estimates the left side from one uniform cloud (``seed``) and the Ball
    body integrals from an independent one (``seed + 1``).

    Returns
    -------
    dict
        ``lhs``, ``rhs``, ``gap``, ``se``, ``ball_length``.
    """
    theta = np.asarray(theta, dtype=float)
    theta = theta / np.linalg.norm(theta)
    volume = K.volume_exact()
    if abs(volume - 1) > 1e-9:
        raise ValueError(f"K must have volume one, got {volume}")
    F = SubspaceBasis(theta[:, None])
    if method == "exact":
        H = K.to_hpolytope()
        lhs = polytope_power_integral(H, theta, q) ** (1.0 / q)
        I_plus = half_slice_moment(K, F, q, theta)
        I_minus = half_slice_moment(K, F, q, -theta)
        rhs, length = _assemble_rhs(I_plus, I_minus, q)
        return {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs), "se": 0.0, "ball_length": length}
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    lhs, se_lhs = directional_moment(sample_uniform(K, N, seed), theta, q)
    p = sample_uniform(K, N, seed + 1).points @ theta
    a_plus = np.where(p >= 0, np.abs(p) ** q, 0.0)
    a_minus = np.where(p < 0, np.abs(p) ** q, 0.0)
    I_plus, I_minus = a_plus.mean(), a_minus.mean()
    if I_plus <= 0 or I_minus <= 0:
        raise ValueError("empty half-slice in the Monte Carlo sample")
    rhs, length = _assemble_rhs(I_plus, I_minus, q)
    S = I_plus + I_minus
    se_rhs = rhs / (q * S) * (a_plus + a_minus).std(ddof=1) / math.sqrt(N)
    se = math.hypot(se_lhs, se_rhs)
    return {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs), "se": se, "ball_length": length}
