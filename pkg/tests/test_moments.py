import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma

from lqcentroid import bodies as B
from lqcentroid.moments import (
    IsotropicModel,
    default_q_grid,
    directional_moment,
    directional_moments,
    isotropic_constant,
    isotropize,
    max_trusted_q,
    moment_profile,
    orlicz_norm,
    psi1_borell_report,
    psi2_constant,
)
from lqcentroid.sampler import LogConcaveSpec, SampleCloud, sample_logconcave, sample_uniform


@pytest.fixture(scope="module")
def cube_cloud():
    return sample_uniform(B.Cube(3, 1.0), 1_000_000, 2024)


@pytest.fixture(scope="module")
def cube1d():
    return sample_uniform(B.Cube(1, 1.0), 1_000_000, 7)


def _orlicz_oracle(alpha):
    """psi_alpha norm of U(-1/2, 1/2) by quadrature and root finding."""

    def excess(t):
        return 2 * quad(lambda y: math.exp((y / t) ** alpha), 0, 0.5)[0] - 2

    return brentq(excess, 0.05, 5, xtol=1e-14)


# -- moment oracles ----------------------------------------------------------


@pytest.mark.parametrize("q, exact", [(1, 0.25), (2, 1 / math.sqrt(12)), (4, (1 / 80) ** 0.25)])
def test_cube_directional_moments(cube_cloud, q, exact):
    v, se = directional_moment(cube_cloud, [1, 0, 0], q)
    assert abs(v - exact) <= 3 * se
    assert se < 1e-3


def test_moment_errors(cube_cloud):
    with pytest.raises(ValueError):
        directional_moment(cube_cloud, [0, 0, 0], 2)
    with pytest.raises(ValueError):
        directional_moment(cube_cloud, [1, 0, 0], 0.5)


def test_directional_moments_vectorized(cube_cloud):
    D = np.random.default_rng(0).standard_normal((5, 3))
    vals, _ = directional_moments(cube_cloud, D, 3)
    for d, v in zip(D, vals):
        assert directional_moment(cube_cloud, d, 3)[0] == pytest.approx(v, rel=1e-12)


# -- isotropic constant -------------------------------------------------------


def test_isotropic_constant_examples():
    for n in (1, 3, 7):
        assert isotropic_constant(B.Cube(n))[0] == pytest.approx(1 / math.sqrt(12), rel=1e-12)
    disk = B.normalized(B.Ball(2))
    assert isotropic_constant(disk)[0] == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-12)


def test_isotropic_constant_affine_invariance():
    rng = np.random.default_rng(5)
    while True:
        T = rng.standard_normal((3, 3))
        if np.linalg.cond(T) <= 10:
            break
    img = B.linear_image(B.Cube(3), T)
    assert isotropic_constant(img)[0] == pytest.approx(1 / math.sqrt(12), rel=1e-12)
    cloud = sample_uniform(img, 200_000, 1)
    value, se = isotropic_constant(img, cloud)
    assert se > 0
    assert abs(value - 1 / math.sqrt(12)) <= 2 * se * math.sqrt(2) + 1e-12


def test_isotropic_constant_needs_volume():
    with pytest.raises(ValueError):
        isotropic_constant(B.Cube(7).to_hpolytope())


# -- isotropize ----------------------------------------------------------------


def test_isotropize_cube_body_convention():
    c = sample_uniform(B.Cube(4), 400_000, 3)
    model, iso = isotropize(c, "body")
    assert model.L == pytest.approx(1 / math.sqrt(12), abs=0.005)
    assert np.allclose(model.map, np.eye(4), atol=0.01)
    assert np.allclose(np.cov(iso.points.T, bias=True), model.L**2 * np.eye(4), atol=1e-12)


def test_isotropize_gaussian_measure_convention():
    c = sample_logconcave(LogConcaveSpec.gaussian(np.eye(3)), 400_000, 4)
    model, iso = isotropize(c)
    assert model.L == 1.0
    assert np.allclose(model.map, np.eye(3), atol=0.01)
    assert np.allclose(iso.points.mean(axis=0), 0, atol=1e-12)


def test_isotropize_generalizes_to_fresh_cloud():
    rng = np.random.default_rng(11)
    T = rng.standard_normal((3, 3)) + 2 * np.eye(3)
    body = B.linear_image(B.Cube(3), T, [1.0, -2.0, 0.5])
    model, _ = isotropize(sample_uniform(body, 400_000, 1))
    Y = model.apply(sample_uniform(body, 400_000, 2).points)
    N = len(Y)
    mean_se = Y.std(axis=0) / math.sqrt(N)
    assert np.linalg.norm(Y.mean(axis=0)) <= 3 * np.linalg.norm(mean_se)
    Yc = Y - Y.mean(axis=0)
    prods = Yc[:, :, None] * Yc[:, None, :]
    cov = prods.mean(axis=0)
    # model-fit noise and fresh-sample noise are of the same size
    se = math.sqrt(2) * prods.std(axis=0) / math.sqrt(N)
    assert np.all(np.abs(cov - np.eye(3)) <= 5 * se)


def test_isotropize_errors():
    with pytest.raises(ValueError, match="10 n"):
        isotropize(sample_uniform(B.Cube(4), 100, 0))
    flat = np.zeros((1000, 2))
    flat[:, 0] = np.random.default_rng(0).standard_normal(1000)
    with pytest.raises(ValueError, match="singular"):
        isotropize(SampleCloud(flat, 0))
    with pytest.raises(ValueError, match="volume"):
        isotropize(sample_logconcave(LogConcaveSpec.gaussian(np.eye(2)), 1000, 0), "body")


def test_isotropic_model_json():
    model, _ = isotropize(sample_uniform(B.Simplex(2), 10_000, 0))
    again = IsotropicModel.from_json(model.to_json())
    assert np.array_equal(again.map, model.map) and np.array_equal(again.shift, model.shift)
    assert again.L == model.L and again.convention == model.convention


# -- Orlicz norms --------------------------------------------------------------


def test_orlicz_psi2_uniform(cube1d):
    exact = _orlicz_oracle(2)
    assert exact == pytest.approx(0.386354, abs=5e-7)
    assert orlicz_norm(cube1d, [1.0], 2) == pytest.approx(exact, rel=5e-3)


def test_orlicz_psi1_uniform(cube1d):
    exact = _orlicz_oracle(1)
    est = orlicz_norm(cube1d, [1.0], 1)
    assert est == pytest.approx(exact, rel=5e-3)
    assert est / 0.25 >= 0.5


def test_orlicz_scaling(cube1d):
    base = orlicz_norm(cube1d, [1.0], 2)
    scaled = SampleCloud(3.5 * cube1d.points, 0)
    assert orlicz_norm(scaled, [1.0], 2) == pytest.approx(3.5 * base, rel=1e-7)


def test_orlicz_errors(cube1d):
    with pytest.raises(ValueError):
        orlicz_norm(cube1d, [1.0], 3)
    with pytest.raises(ValueError):
        orlicz_norm(SampleCloud(np.zeros((10, 1)), 0), [1.0], 2)


# -- psi constants ---------------------------------------------------------------


def test_psi2_constant_cube(cube_cloud):
    prof = moment_profile(cube_cloud, [1, 0, 0], [1, 2, 4])
    ratios = prof.values / (np.sqrt(prof.q_grid) * prof.values[0])
    assert ratios[0] == 1.0
    assert ratios[1:] == pytest.approx([0.8165, 0.6687], abs=2e-3)
    assert psi2_constant(prof) == 1.0


def test_psi2_constant_gaussian():
    grid = [1, 2, 3, 4, 6, 8, 12, 16]
    exact = [math.sqrt(2) * (gamma((q + 1) / 2) / math.sqrt(math.pi)) ** (1 / q) for q in grid]
    sup_exact = max(e / (math.sqrt(q) * exact[0]) for q, e in zip(grid, exact))
    g = sample_logconcave(LogConcaveSpec.gaussian([[1.0]]), 1_000_000, 6)
    prof = moment_profile(g, [1.0], grid)
    assert np.all(np.abs(prof.values - exact) <= 3 * prof.std_errors + 1e-3 * np.array(exact))
    assert 1.0 <= psi2_constant(prof) <= 1.3
    assert psi2_constant(prof) == pytest.approx(sup_exact, rel=1e-12)


def test_psi1_report(cube_cloud):
    prof = moment_profile(cube_cloud, [1, 0, 0], [1, 2, 4, 8])
    assert psi1_borell_report(prof) == 1.0
    lap = sample_logconcave(LogConcaveSpec.product_exponential([1.0], symmetric=True), 1_000_000, 8)
    prof = moment_profile(lap, [1.0], [1, 2, 4, 8])
    ratios = prof.values / (prof.q_grid * prof.values[0])
    exact = np.array([gamma(q + 1) ** (1 / q) / q for q in (1, 2, 4, 8)])
    assert np.all(np.abs(ratios - exact) <= 0.03)
    assert psi1_borell_report(prof) == 1.0


def test_psi_requires_first_moment(cube_cloud):
    prof = moment_profile(cube_cloud, [1, 0, 0], [2, 4])
    with pytest.raises(KeyError):
        psi2_constant(prof)


# -- grids and profiles ----------------------------------------------------------


def test_default_grid_and_trust():
    assert default_q_grid(2) == [1, 2, 3]
    assert default_q_grid(16) == [1, 2, 3, 4, 8, 16]
    assert max_trusted_q(10**6) == pytest.approx(2 * math.log(10**6))
    c = sample_uniform(B.Cube(2), 1000, 0)
    prof = moment_profile(c, [1, 0], [1, 8, 16])
    assert list(prof.trusted) == [True, True, False]


def test_profile_csv(cube_cloud):
    prof = moment_profile(cube_cloud, [0, 2, 0], [1, 2])
    lines = prof.to_csv().splitlines()
    assert lines[0] == "q,value,se,trusted"
    assert np.allclose(prof.direction, [0, 1, 0])
    assert float(lines[1].split(",")[1]) == prof.values[0]


# -- properties --------------------------------------------------------------------

CLOUDS = {
    "cube": sample_uniform(B.Cube(3), 20_000, 1),
    "simplex": sample_uniform(B.Simplex(3), 20_000, 2),
    "cross": sample_uniform(B.CrossPolytope(3), 20_000, 3),
}
direction = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(sorted(CLOUDS)), x=direction)
def test_moments_monotone_in_q(name, x):
    prof = moment_profile(CLOUDS[name], x, [1, 1.5, 2, 3, 4, 6, 8])
    v, e = prof.values, prof.std_errors
    for i in range(len(v) - 1):
        assert v[i] <= v[i + 1] + 3 * (e[i] + e[i + 1])
    assert psi1_borell_report(prof) <= 2


@settings(max_examples=40, deadline=None)
@given(x=direction, lam=st.floats(-100, 100).filter(lambda t: abs(t) > 1e-3), q=st.sampled_from([1, 2, 3.5, 8]))
def test_moment_homogeneous(x, lam, q):
    c = CLOUDS["simplex"]
    a = directional_moment(c, np.multiply(lam, x), q)[0]
    b = directional_moment(c, x, q)[0]
    assert a == pytest.approx(abs(lam) * b, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), x=direction, q=st.sampled_from([1, 2, 5]))
def test_moment_equivariance(seed, x, q):
    T = np.random.default_rng(seed).standard_normal((3, 3))
    X = CLOUDS["cross"].points
    a = directional_moment(X @ T.T, x, q)[0]
    b = directional_moment(X, T.T @ np.asarray(x), q)[0]
    assert a == pytest.approx(b, rel=1e-10)
