"""Convex bodies with exact membership, support and gauge oracles.

Reference bodies (ball, cube, simplex, cross-polytope, l_p ball) are built
centred at the origin. Polytopes can be given by halfspaces
(:class:`HPolytope`) or vertices (:class:`VPolytope`); :class:`LinearImage`
wraps any body under an invertible affine map.

All oracles accept either a single vector of shape ``(n,)`` or a batch of
shape ``(m, n)`` and return a scalar or an array of length ``m``.
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, Delaunay, HalfspaceIntersection
from scipy.special import gammaln

__all__ = [
    "BodySpecError",
    "ConvexBody",
    "Ball",
    "Cube",
    "CrossPolytope",
    "LpBall",
    "HPolytope",
    "VPolytope",
    "Simplex",
    "LinearImage",
    "SubspaceBasis",
    "support",
    "membership",
    "gauge",
    "slice_subspace",
    "linear_image",
    "volume_exact",
    "normalized",
    "unit_ball_volume",
    "body_from_spec",
    "body_to_spec",
]

FEAS_TOL = 1e-9
_EXACT_TOL = 1e-12
MAX_TRIANGULATION_DIM = 6


class BodySpecError(ValueError):
    """Invalid body description; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def unit_ball_volume(n):
    """Volume of the Euclidean unit ball in dimension ``n`` (``n = 0`` gives 1)."""
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1))


def _as_batch(x, n):
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError(f"expected vectors of dimension {n}, got shape {np.shape(x)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vectors must be finite")
    return arr, single


def _unbatch(values, single):
    return values[0].item() if single else values


def _chunked(fn, X, rows=8192):
    if len(X) <= rows:
        return fn(X)
    return np.concatenate([fn(X[i : i + rows]) for i in range(0, len(X), rows)])


class ConvexBody:
    """Base class. Subclasses implement the batched ``_support``/``_membership``."""

    kind = "abstract"
    dim: int

    # -- public oracles ----------------------------------------------------
    def support(self, x):
        X, single = _as_batch(x, self.dim)
        return _unbatch(_chunked(self._support, X), single)

    def membership(self, y):
        Y, single = _as_batch(y, self.dim)
        return _unbatch(_chunked(self._membership, Y), single)

    def gauge(self, y):
        Y, single = _as_batch(y, self.dim)
        return _unbatch(_chunked(self._gauge, Y), single)

    def volume_exact(self):
        raise NotImplementedError(f"no exact volume for kind {self.kind!r}")

    # -- defaults ----------------------------------------------------------
    def _gauge(self, Y):
        self._require_origin_interior()
        out = np.zeros(len(Y))
        zero = np.zeros(self.dim)
        for i, y in enumerate(Y):
            r = np.linalg.norm(y)
            if r == 0:
                continue
            _, hi = self.chord(zero, y / r)
            out[i] = r / hi
        return out

    def _require_origin_interior(self):
        zero = np.zeros(self.dim)
        if not self.membership(zero):
            raise ValueError("gauge requires the origin in the interior of the body")
        for e in np.eye(self.dim):
            lo, hi = self.chord(zero, e)
            if hi <= _EXACT_TOL or lo >= -_EXACT_TOL:
                raise ValueError("gauge requires the origin in the interior of the body")

    def interior_point(self):
        return np.zeros(self.dim)

    def chord(self, x, d):
        """Return ``(lo, hi)`` such that ``x + s d`` lies in the body iff lo <= s <= hi.

        The generic implementation bisects on the membership oracle to an
        absolute tolerance of 1e-10 (in units of ``s``).
        """
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        dd = float(d @ d)
        if dd == 0:
            raise ValueError("chord direction must be nonzero")
        hi_bound = (self.support(d) - x @ d) / dd
        lo_bound = -(self.support(-d) + x @ d) / dd
        return (_bisect_edge(self, x, d, 0.0, lo_bound), _bisect_edge(self, x, d, 0.0, hi_bound))

    def to_hpolytope(self):
        raise NotImplementedError(f"kind {self.kind!r} has no halfspace representation")

    def to_spec(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


def _bisect_edge(body, x, d, inside, outside, tol=1e-10):
    if body.membership(x + outside * d):
        return outside
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if body.membership(x + mid * d):
            inside = mid
        else:
            outside = mid
    return inside


def _interval_ratio(lhs_coef, slack):
    """Largest interval of s with ``lhs_coef * s <= slack`` holding row-wise."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = slack / lhs_coef
    pos = lhs_coef > 0
    neg = lhs_coef < 0
    hi = np.min(ratios[pos]) if pos.any() else np.inf
    lo = np.max(ratios[neg]) if neg.any() else -np.inf
    return float(lo), float(hi)


class Ball(ConvexBody):
    kind = "ball"

    def __init__(self, dim, radius=1.0):
        _check_dim(dim)
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.dim = int(dim)
        self.radius = float(radius)

    def _support(self, X):
        return self.radius * np.linalg.norm(X, axis=1)

    def _membership(self, Y):
        return np.linalg.norm(Y, axis=1) <= self.radius * (1 + _EXACT_TOL)

    def _gauge(self, Y):
        return np.linalg.norm(Y, axis=1) / self.radius

    def chord(self, x, d):
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        a = d @ d
        b = x @ d
        c = x @ x - self.radius**2
        disc = max(b * b - a * c, 0.0)
        root = math.sqrt(disc)
        return (-b - root) / a, (-b + root) / a

    def volume_exact(self):
        return unit_ball_volume(self.dim) * self.radius**self.dim

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "radius": self.radius}

    def __repr__(self):
        return f"Ball(dim={self.dim}, radius={self.radius:g})"


class Cube(ConvexBody):
    """The cube ``[-side/2, side/2]^n``."""

    kind = "cube"

    def __init__(self, dim, side=1.0):
        _check_dim(dim)
        if not side > 0:
            raise ValueError("side must be positive")
        self.dim = int(dim)
        self.side = float(side)

    def _support(self, X):
        return 0.5 * self.side * np.abs(X).sum(axis=1)

    def _membership(self, Y):
        return np.abs(Y).max(axis=1) <= 0.5 * self.side * (1 + _EXACT_TOL)

    def _gauge(self, Y):
        return 2.0 * np.abs(Y).max(axis=1) / self.side

    def chord(self, x, d):
        h = 0.5 * self.side
        A = np.concatenate([d, -d])
        slack = np.concatenate([h - x, h + x])
        return _interval_ratio(A, slack)

    def volume_exact(self):
        return self.side**self.dim

    def to_hpolytope(self):
        eye = np.eye(self.dim)
        return HPolytope(np.vstack([eye, -eye]), np.full(2 * self.dim, 0.5 * self.side))

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "side": self.side}

    def __repr__(self):
        return f"Cube(dim={self.dim}, side={self.side:g})"


class LpBall(ConvexBody):
    """``{y : ||y||_p <= radius}`` for ``1 <= p <= inf``."""

    kind = "lp_ball"

    def __init__(self, dim, p, radius=1.0):
        _check_dim(dim)
        p = float(p)
        if not p >= 1:
            raise ValueError("p must be >= 1 for a convex l_p ball")
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.dim = int(dim)
        self.p = p
        self.radius = float(radius)

    @property
    def dual_exponent(self):
        if self.p == 1:
            return np.inf
        if np.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1)

    def _support(self, X):
        return self.radius * np.linalg.norm(X, ord=self.dual_exponent, axis=1)

    def _gauge(self, Y):
        return np.linalg.norm(Y, ord=self.p, axis=1) / self.radius

    def _membership(self, Y):
        return self._gauge(Y) <= 1 + _EXACT_TOL

    def volume_exact(self):
        n, p = self.dim, self.p
        if np.isinf(p):
            return (2 * self.radius) ** n
        log_vol = n * math.log(2 * self.radius) + n * gammaln(1 + 1 / p) - gammaln(1 + n / p)
        return math.exp(log_vol)

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "p": self.p, "radius": self.radius}

    def __repr__(self):
        return f"LpBall(dim={self.dim}, p={self.p:g}, radius={self.radius:g})"


class CrossPolytope(LpBall):
    """The l_1 ball of the given radius."""

    kind = "cross_polytope"

    def __init__(self, dim, radius=1.0):
        super().__init__(dim, 1.0, radius)

    def _support(self, X):
        return self.radius * np.abs(X).max(axis=1)

    def _gauge(self, Y):
        return np.abs(Y).sum(axis=1) / self.radius

    @property
    def vertices(self):
        eye = np.eye(self.dim) * self.radius
        return np.vstack([eye, -eye])

    def to_hpolytope(self):
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * self.dim, indexing="ij")).reshape(self.dim, -1).T
        return HPolytope(signs, np.full(len(signs), self.radius))

    def chord(self, x, d):
        if self.dim > 10:
            return ConvexBody.chord(self, x, d)
        return self.to_hpolytope().chord(x, d)

    def volume_exact(self):
        return (2 * self.radius) ** self.dim / math.factorial(self.dim)

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "radius": self.radius}

    def __repr__(self):
        return f"CrossPolytope(dim={self.dim}, radius={self.radius:g})"


class HPolytope(ConvexBody):
    """``{y : A y <= b}``; must be bounded with nonempty interior."""

    kind = "h_polytope"

    def __init__(self, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != b.shape[0]:
            raise ValueError(f"A has shape {A.shape} but b has length {b.shape[0]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite")
        self.A = A
        self.b = b
        self.dim = A.shape[1]
        center, radius = chebyshev_center(A, b)
        if radius <= FEAS_TOL:
            raise ValueError("polytope has empty interior")
        self._center = center
        self.inradius = radius
        for e in np.vstack([np.eye(self.dim), -np.eye(self.dim)]):
            if not np.isfinite(_lp_support(A, b, e)):
                raise ValueError("halfspace representation is unbounded")

    def interior_point(self):
        return self._center.copy()

    @cached_property
    def vertices(self):
        if self.dim == 1:
            lo, hi = _interval_ratio(self.A[:, 0], self.b)
            return np.array([[lo], [hi]])
        halfspaces = np.hstack([self.A, -self.b[:, None]])
        hs = HalfspaceIntersection(halfspaces, self._center)
        pts = hs.intersections
        hull = ConvexHull(pts)
        return pts[np.sort(hull.vertices)]

    def _support(self, X):
        if self.dim <= MAX_TRIANGULATION_DIM:
            return (X @ self.vertices.T).max(axis=1)
        return np.array([_lp_support(self.A, self.b, x) for x in X])

    def _membership(self, Y):
        scale = 1.0 + np.abs(self.b)
        return np.all(Y @ self.A.T <= self.b + FEAS_TOL * scale, axis=1)

    def _gauge(self, Y):
        if np.any(self.b <= FEAS_TOL):
            raise ValueError("gauge requires the origin in the interior of the body")
        return np.maximum((Y @ self.A.T / self.b).max(axis=1), 0.0)

    def chord(self, x, d):
        return _interval_ratio(self.A @ d, self.b - self.A @ x)

    def volume_exact(self):
        return _triangulated_volume(self.vertices)

    def to_hpolytope(self):
        return self

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "A": self.A.tolist(), "b": self.b.tolist()}

    def __repr__(self):
        return f"HPolytope(dim={self.dim}, facets={len(self.b)})"


class VPolytope(ConvexBody):
    """Convex hull of a vertex list spanning ``R^n`` affinely."""

    kind = "v_polytope"

    def __init__(self, vertices):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if not np.all(np.isfinite(V)):
            raise ValueError("vertices must be finite")
        n = V.shape[1]
        if len(V) < n + 1 or np.linalg.matrix_rank(V[1:] - V[0], tol=1e-10) < n:
            raise ValueError("vertices do not affinely span the space")
        self.points = V
        self.dim = n

    @cached_property
    def vertices(self):
        if self.dim == 1:
            return np.array([[self.points.min()], [self.points.max()]])
        hull = ConvexHull(self.points)
        return self.points[np.sort(hull.vertices)]

    @cached_property
    def _hrep(self):
        if self.dim == 1:
            lo, hi = self.points.min(), self.points.max()
            return HPolytope([[1.0], [-1.0]], [hi, -lo])
        eq = ConvexHull(self.points).equations
        return HPolytope(eq[:, :-1], -eq[:, -1])

    def interior_point(self):
        return self.vertices.mean(axis=0)

    def _support(self, X):
        return (X @ self.vertices.T).max(axis=1)

    def _membership(self, Y):
        return self._hrep._membership(Y)

    def _gauge(self, Y):
        return self._hrep._gauge(Y)

    def chord(self, x, d):
        return self._hrep.chord(x, d)

    def volume_exact(self):
        return _triangulated_volume(self.vertices)

    def to_hpolytope(self):
        return self._hrep

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "vertices": self.points.tolist()}

    def __repr__(self):
        return f"VPolytope(dim={self.dim}, vertices={len(self.vertices)})"


class Simplex(VPolytope):
    """An n-simplex with barycentre at the origin.

    ``variant="regular"`` is scaled to volume one. ``variant="standard"`` is
    ``conv{0, e_1, ..., e_n}`` translated to barycentre zero (volume ``1/n!``).
    """

    kind = "simplex"

    def __init__(self, dim, variant="regular"):
        _check_dim(dim)
        n = int(dim)
        if variant == "standard":
            V = np.vstack([np.zeros(n), np.eye(n)])
        elif variant == "regular":
            # orthonormal basis of the hyperplane sum(x) = 0 in R^{n+1}
            basis = np.linalg.qr(np.eye(n + 1) - 1.0 / (n + 1))[0][:, :n]
            V = np.eye(n + 1) @ basis
            vol = math.sqrt(n + 1) / math.factorial(n)
            V = V * vol ** (-1.0 / n)
        else:
            raise ValueError(f"unknown simplex variant {variant!r}")
        V = V - V.mean(axis=0)
        super().__init__(V)
        self.variant = variant

    @property
    def vertices(self):
        return self.points

    def volume_exact(self):
        V = self.points
        return abs(np.linalg.det(V[1:] - V[0])) / math.factorial(self.dim)

    def to_spec(self):
        return {"kind": self.kind, "dim": self.dim, "variant": self.variant}

    def __repr__(self):
        return f"Simplex(dim={self.dim}, variant={self.variant!r})"


class LinearImage(ConvexBody):
    """``T(base) + shift`` for an invertible matrix ``T``."""

    kind = "linear_image"

    def __init__(self, base, T, shift=None):
        T = np.atleast_2d(np.asarray(T, dtype=float))
        n = base.dim
        if T.shape != (n, n):
            raise ValueError(f"T must be {n}x{n}, got {T.shape}")
        if not np.all(np.isfinite(T)) or np.linalg.cond(T) > 1e12:
            raise ValueError("T is singular")
        shift = np.zeros(n) if shift is None else np.asarray(shift, dtype=float).reshape(n)
        self.base = base
        self.T = T
        self.shift = shift
        self.dim = n
        self._Tinv = np.linalg.inv(T)

    def _to_base(self, Y):
        return (Y - self.shift) @ self._Tinv.T

    def _support(self, X):
        return self.base._support(X @ self.T) + X @ self.shift

    def _membership(self, Y):
        return self.base._membership(self._to_base(Y))

    def _gauge(self, Y):
        if np.any(self.shift != 0):
            return ConvexBody._gauge(self, Y)
        return self.base._gauge(Y @ self._Tinv.T)

    def chord(self, x, d):
        return self.base.chord(self._Tinv @ (np.asarray(x) - self.shift), self._Tinv @ np.asarray(d))

    def interior_point(self):
        return self.T @ self.base.interior_point() + self.shift

    def volume_exact(self):
        return abs(np.linalg.det(self.T)) * self.base.volume_exact()

    def to_hpolytope(self):
        H = self.base.to_hpolytope()
        A = H.A @ self._Tinv
        return HPolytope(A, H.b + A @ self.shift)

    @property
    def vertices(self):
        return self.base.vertices @ self.T.T + self.shift

    def to_spec(self):
        return {
            "kind": self.kind,
            "dim": self.dim,
            "base": self.base.to_spec(),
            "T": self.T.tolist(),
            "shift": self.shift.tolist(),
        }

    def __repr__(self):
        return f"LinearImage({self.base!r})"


# -- module-level operations ------------------------------------------------

def support(body, x):
    """Support function ``h_body(x) = max <x, y>`` over the body."""
    return body.support(x)


def membership(body, y):
    return body.membership(y)


def gauge(body, y):
    """Minkowski functional ``inf{t > 0 : y in t K}``; needs 0 in the interior."""
    return body.gauge(y)


def volume_exact(body):
    return body.volume_exact()


def linear_image(body, T, shift=None):
    """Affine image ``T body + shift``; nested images are composed."""
    if isinstance(body, LinearImage):
        T = np.atleast_2d(np.asarray(T, dtype=float))
        s = np.zeros(body.dim) if shift is None else np.asarray(shift, dtype=float)
        return LinearImage(body.base, T @ body.T, T @ body.shift + s)
    return LinearImage(body, T, shift)


def normalized(body):
    """The volume-one dilation ``K / |K|^{1/n}``."""
    scale = body.volume_exact() ** (-1.0 / body.dim)
    return linear_image(body, scale * np.eye(body.dim))


@dataclass(frozen=True)
class SubspaceBasis:
    """A k-dimensional subspace F of R^n given by orthonormal columns."""

    columns: np.ndarray

    def __post_init__(self):
        U = np.atleast_2d(np.asarray(self.columns, dtype=float))
        if U.shape[0] == 1 and U.shape[1] > 1:
            U = U.T
        gram = U.T @ U
        if np.abs(gram - np.eye(U.shape[1])).max() > 1e-12:
            raise ValueError("subspace basis columns are not orthonormal")
        object.__setattr__(self, "columns", U)

    @property
    def n(self):
        return self.columns.shape[0]

    @property
    def k(self):
        return self.columns.shape[1]

    def complement(self):
        """Orthonormal basis of ``F^perp``."""
        if self.k == self.n:
            raise ValueError("the full space has a trivial complement")
        q, _ = np.linalg.qr(np.hstack([self.columns, np.eye(self.n)]))
        return SubspaceBasis(q[:, self.k:self.n])

    def project(self, Y):
        """Coordinates of the orthogonal projection in this basis."""
        return np.asarray(Y, dtype=float) @ self.columns

    @classmethod
    def span(cls, *vectors):
        V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        q, r = np.linalg.qr(V)
        if np.abs(np.diag(r)).min() < 1e-12:
            raise ValueError("spanning vectors are linearly dependent")
        return cls(q)

    @classmethod
    def random(cls, n, k, rng):
        """Haar-distributed subspace in ``G_{n,k}``."""
        q, r = np.linalg.qr(rng.standard_normal((n, k)))
        return cls(q * np.sign(np.diag(r)))


def slice_subspace(body, basis):
    """Intersect a polytope with ``span(U)``; returns an HPolytope in k coordinates.

    Raises ``ValueError`` if the slice is empty or has empty relative interior.
    """
    H = body.to_hpolytope()
    if basis.n != H.dim:
        raise ValueError("basis dimension does not match the body")
    A = H.A @ basis.columns
    keep = np.linalg.norm(A, axis=1) > 1e-14
    # rows with A U = 0 constrain nothing unless infeasible
    if np.any(H.b[~keep] < -FEAS_TOL):
        raise ValueError("slice is empty")
    try:
        return HPolytope(A[keep], H.b[keep])
    except ValueError as err:
        raise ValueError(f"slice is empty or degenerate ({err})") from None


# -- helpers ---------------------------------------------------------------

def chebyshev_center(A, b):
    """Centre and radius of the largest inscribed ball of ``{A y <= b}``."""
    norms = np.linalg.norm(A, axis=1)
    n = A.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if res.status == 3:
        # unbounded radius means the set is unbounded with interior
        return np.zeros(n), np.inf
    if res.status != 0:
        return np.zeros(n), 0.0
    return res.x[:n], res.x[-1]


def _lp_support(A, b, x):
    res = linprog(-np.asarray(x), A_ub=A, b_ub=b, bounds=[(None, None)] * A.shape[1], method="highs")
    if res.status == 3:
        return np.inf
    if res.status != 0:
        raise RuntimeError(f"support LP failed: {res.message}")
    return -res.fun


def _triangulated_volume(vertices):
    V = np.asarray(vertices, dtype=float)
    n = V.shape[1]
    if n == 1:
        return float(V.max() - V.min())
    if n > MAX_TRIANGULATION_DIM:
        raise ValueError(f"exact polytope volume supported for dim <= {MAX_TRIANGULATION_DIM}")
    simplices = V[Delaunay(V).simplices]
    edges = simplices[:, 1:, :] - simplices[:, :1, :]
    return float(np.abs(np.linalg.det(edges)).sum() / math.factorial(n))


def _check_dim(dim):
    if isinstance(dim, bool) or int(dim) != dim or dim < 1:
        raise ValueError(f"dimension must be a positive integer, got {dim!r}")


# -- JSON body specs ---------------------------------------------------------

def _field(spec, key, path, default=None, required=True):
    if key not in spec:
        if required:
            raise BodySpecError(f"{path}.{key}", "missing required field")
        return default
    return spec[key]


def _number(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        if not (isinstance(value, str) and value in ("inf", "Infinity")):
            raise BodySpecError(path, f"expected a number, got {value!r}")
        value = math.inf
    if positive and not value > 0:
        raise BodySpecError(path, "must be positive")
    return float(value)


def _matrix(value, path, rows=None, cols=None):
    if not isinstance(value, list) or not value:
        raise BodySpecError(path, "expected a non-empty list of rows")
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise BodySpecError(f"{path}[{i}]", "expected a list")
        if cols is not None and len(row) != cols:
            raise BodySpecError(f"{path}[{i}]", f"expected {cols} entries, got {len(row)}")
        for j, v in enumerate(row):
            _number(v, f"{path}[{i}][{j}]")
    if rows is not None and len(value) != rows:
        raise BodySpecError(path, f"expected {rows} rows, got {len(value)}")
    return np.array(value, dtype=float)


def _vector(value, path, length=None):
    if not isinstance(value, list):
        raise BodySpecError(path, "expected a list")
    for i, v in enumerate(value):
        _number(v, f"{path}[{i}]")
    if length is not None and len(value) != length:
        raise BodySpecError(path, f"expected {length} entries, got {len(value)}")
    return np.array(value, dtype=float)


def body_from_spec(spec, path="$"):
    """Build a body from its JSON description.

    >>> body_from_spec({"kind": "cube", "dim": 3, "side": 1.0})
    Cube(dim=3, side=1)
    """
    if not isinstance(spec, dict):
        raise BodySpecError(path, "expected an object")
    kind = _field(spec, "kind", path)
    dim = _field(spec, "dim", path)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise BodySpecError(f"{path}.dim", "expected a positive integer")
    try:
        if kind == "ball":
            return Ball(dim, _number(_field(spec, "radius", path, 1.0, False), f"{path}.radius", True))
        if kind == "cube":
            return Cube(dim, _number(_field(spec, "side", path, 1.0, False), f"{path}.side", True))
        if kind == "simplex":
            variant = _field(spec, "variant", path, "regular", False)
            if variant not in ("regular", "standard"):
                raise BodySpecError(f"{path}.variant", "expected 'regular' or 'standard'")
            return Simplex(dim, variant)
        if kind == "cross_polytope":
            return CrossPolytope(dim, _number(_field(spec, "radius", path, 1.0, False), f"{path}.radius", True))
        if kind == "lp_ball":
            p = _number(_field(spec, "p", path), f"{path}.p")
            if not p >= 1:
                raise BodySpecError(f"{path}.p", "must be >= 1")
            r = _number(_field(spec, "radius", path, 1.0, False), f"{path}.radius", True)
            return LpBall(dim, p, r)
        if kind == "h_polytope":
            A = _matrix(_field(spec, "A", path), f"{path}.A", cols=dim)
            b = _vector(_field(spec, "b", path), f"{path}.b", length=len(A))
            return HPolytope(A, b)
        if kind == "v_polytope":
            V = _matrix(_field(spec, "vertices", path), f"{path}.vertices", cols=dim)
            return VPolytope(V)
        if kind == "linear_image":
            base = body_from_spec(_field(spec, "base", path), f"{path}.base")
            if base.dim != dim:
                raise BodySpecError(f"{path}.base.dim", f"expected {dim}, got {base.dim}")
            T = _matrix(_field(spec, "T", path), f"{path}.T", rows=dim, cols=dim)
            shift = spec.get("shift")
            shift = None if shift is None else _vector(shift, f"{path}.shift", length=dim)
            return LinearImage(base, T, shift)
    except BodySpecError:
        raise
    except ValueError as err:
        raise BodySpecError(path, str(err)) from None
    raise BodySpecError(f"{path}.kind", f"unknown body kind {kind!r}")


def body_to_spec(body):
    return body.to_spec()
