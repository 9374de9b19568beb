import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lqcentroid import bodies as B

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def vec(n):
    return arrays(np.float64, n, elements=finite)


REFERENCE = [
    B.Ball(3, 1.5),
    B.Cube(3, 1.0),
    B.CrossPolytope(3),
    B.LpBall(3, 3.0),
    B.Simplex(3),
    B.Simplex(3, "standard"),
    B.HPolytope(np.vstack([np.eye(3), -np.eye(3)]), [1, 2, 3, 1, 2, 3]),
    B.VPolytope([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]),
    B.LinearImage(B.Cube(3), [[2, 1, 0], [0, 1, 0], [0, 0, 3]], [0.1, 0, 0]),
]


# -- oracle examples ---------------------------------------------------------


def test_support_examples():
    assert B.support(B.Cube(3, 1.0), [1, 0, 0]) == pytest.approx(0.5, abs=1e-15)
    theta = np.array([1, -2, 0.5, 3, 1.0])
    assert B.support(B.Ball(5), theta / np.linalg.norm(theta)) == pytest.approx(1.0, abs=1e-15)
    assert B.support(B.Cube(2, 1.0), [1, 1]) == pytest.approx(1.0, abs=1e-15)


def test_membership_examples():
    assert B.membership(B.Ball(4), np.zeros(4))
    assert not B.membership(B.Cube(2, 1.0), [0.6, 0])
    tri = B.HPolytope([[1, 1], [-1, 0], [0, -1]], [1, 0, 0])
    assert B.membership(tri, [0.5, 0.5])


def test_gauge_examples():
    y = np.array([0.3, -1.2, 2.0])
    assert B.gauge(B.Ball(3), y) == pytest.approx(np.linalg.norm(y), rel=1e-14)
    assert B.gauge(B.Cube(3, 1.0), y) == pytest.approx(2 * np.abs(y).max(), rel=1e-14)
    for K in REFERENCE[:4]:
        assert B.gauge(K, np.zeros(3)) == 0


def test_gauge_requires_interior_origin():
    K = B.HPolytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [2, 2, -1, 1])  # x in [1, 2]
    with pytest.raises(ValueError):
        K.gauge([1.0, 0.0])


def test_volume_examples():
    assert B.volume_exact(B.Ball(2)) == pytest.approx(math.pi, rel=1e-14)
    for n in (1, 2, 5, 9):
        assert B.volume_exact(B.Cube(n, 1.0)) == pytest.approx(1.0, rel=1e-14)
    assert B.volume_exact(B.Simplex(3, "standard")) == pytest.approx(1 / 6, rel=1e-12)
    assert B.volume_exact(B.Simplex(4)) == pytest.approx(1.0, rel=1e-12)
    assert B.volume_exact(B.CrossPolytope(3)) == pytest.approx(8 / 6, rel=1e-12)


def test_polytope_volume_matches_triangulation():
    P = B.Cube(3, 2.0).to_hpolytope()
    assert P.volume_exact() == pytest.approx(8.0, rel=1e-12)
    V = B.VPolytope(B.CrossPolytope(4).vertices)
    assert V.volume_exact() == pytest.approx(2**4 / 24, rel=1e-12)


def test_centered_reference_bodies():
    for variant in ("regular", "standard"):
        S = B.Simplex(4, variant)
        assert np.allclose(S.vertices.mean(axis=0), 0, atol=1e-12)


def test_hpolytope_errors():
    with pytest.raises(ValueError, match="empty interior"):
        B.HPolytope([[1.0], [-1.0]], [0.0, 0.0])
    with pytest.raises(ValueError, match="unbounded"):
        B.HPolytope([[1.0, 0.0]], [1.0])


# -- slices and images -------------------------------------------------------


def test_slice_examples():
    sl = B.slice_subspace(B.Cube(2, 1.0), B.SubspaceBasis.span([1, 0]))
    assert np.allclose(np.sort(sl.vertices.ravel()), [-0.5, 0.5])
    sq = B.slice_subspace(B.Cube(3, 1.0), B.SubspaceBasis.span([1, 0, 0], [0, 1, 0]))
    assert sq.volume_exact() == pytest.approx(1.0, rel=1e-12)
    sl = B.slice_subspace(B.Simplex(3), B.SubspaceBasis.span([1, 1, 0]))
    assert sl.volume_exact() > 0


def test_subspace_basis_checks_orthonormality():
    with pytest.raises(ValueError):
        B.SubspaceBasis(np.array([[1.0, 1.0], [0.0, 1.0]]))
    F = B.SubspaceBasis.random(5, 2, np.random.default_rng(0))
    E = F.complement()
    assert E.k == 3
    assert np.allclose(F.columns.T @ E.columns, 0, atol=1e-12)


def test_linear_image_examples():
    x = np.array([0.3, -0.4, 1.2])
    K2 = B.linear_image(B.Ball(3), 2 * np.eye(3))
    assert K2.support(x) == pytest.approx(2 * np.linalg.norm(x), rel=1e-14)
    K = B.Cube(3, 1.0)
    same = B.linear_image(K, np.eye(3))
    assert same.support(x) == K.support(x)
    Q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((3, 3)))
    rotated = B.linear_image(K, Q)
    assert rotated.support(Q @ x) == pytest.approx(K.support(x), rel=1e-12)
    with pytest.raises(ValueError):
        B.linear_image(K, np.zeros((3, 3)))


def test_linear_image_shift_in_support():
    T = np.array([[1.0, 2.0], [0.0, 1.0]])
    s = np.array([0.5, -1.0])
    K = B.linear_image(B.Cube(2), T, s)
    x = np.array([0.7, 0.2])
    assert K.support(x) == pytest.approx(B.Cube(2).support(T.T @ x) + s @ x, rel=1e-14)


@pytest.mark.parametrize("base", [B.Cube(3), B.Simplex(3, "standard"), B.CrossPolytope(4)])
def test_volume_of_image(base):
    T = np.random.default_rng(3).standard_normal((base.dim, base.dim))
    img = B.linear_image(base, T)
    assert img.volume_exact() == pytest.approx(abs(np.linalg.det(T)) * base.volume_exact(), rel=1e-9)


def test_normalized_has_volume_one():
    for K in (B.Ball(3, 2.0), B.CrossPolytope(2), B.Simplex(3, "standard")):
        assert B.normalized(K).volume_exact() == pytest.approx(1.0, rel=1e-12)


# -- specs -------------------------------------------------------------------


@pytest.mark.parametrize("K", REFERENCE)
def test_spec_round_trip(K):
    K2 = B.body_from_spec(B.body_to_spec(K))
    X = np.random.default_rng(0).standard_normal((20, 3))
    assert np.allclose(K.support(X), K2.support(X), rtol=1e-12)


def test_spec_errors_name_the_field():
    with pytest.raises(B.BodySpecError) as err:
        B.body_from_spec({"kind": "h_polytope", "dim": 2, "A": [[1, 0], [0, "x"]], "b": [1, 1]})
    assert "$.A[1][1]" in str(err.value)
    with pytest.raises(B.BodySpecError) as err:
        B.body_from_spec({"kind": "linear_image", "dim": 1, "base": {"kind": "cube"}, "T": [[1]]})
    assert err.value.path == "$.base.dim"
    with pytest.raises(B.BodySpecError):
        B.body_from_spec({"kind": "dodecahedron", "dim": 3})


# -- properties --------------------------------------------------------------


@pytest.mark.parametrize("K", REFERENCE)
def test_support_subadditive_bulk(K):
    rng = np.random.default_rng(7)
    X = rng.standard_normal((10_000, 3))
    Y = rng.standard_normal((10_000, 3))
    lhs = K.support(X + Y)
    rhs = K.support(X) + K.support(Y)
    assert np.all(lhs <= rhs + 1e-12 * (1 + np.abs(rhs)))


@settings(max_examples=60, deadline=None)
@given(x=vec(3), lam=st.floats(1e-3, 1e3))
def test_support_homogeneous(x, lam):
    for K in REFERENCE:
        assert K.support(lam * x) == pytest.approx(lam * K.support(x), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(y=vec(3))
def test_gauge_membership_consistent(y):
    for K in (B.Ball(3), B.Cube(3), B.CrossPolytope(3), B.LpBall(3, 3.0)):
        g = K.gauge(y)
        if abs(g - 1) > 1e-9:
            assert K.membership(y) == (g < 1)


@settings(max_examples=60, deadline=None)
@given(y=vec(4))
def test_closed_forms(y):
    assert B.Cube(4).gauge(y) == pytest.approx(2 * np.abs(y).max(), rel=1e-12, abs=1e-300)
    assert B.Cube(4).support(y) == pytest.approx(np.abs(y).sum() / 2, rel=1e-12, abs=1e-300)
