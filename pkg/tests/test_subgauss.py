import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from lqcentroid import bodies as B
from lqcentroid.moments import isotropize
from lqcentroid.sampler import LogConcaveSpec, SampleCloud, sample_logconcave, sample_uniform
from lqcentroid.subgauss import (
    SearchConfig,
    UntrustedOrderError,
    euclidean_moment,
    euclidean_moment_ratio,
    find_direction,
    moment_growth_check,
    t_body,
    t_support,
    t_support_levels,
    tail_profile,
)

L_CUBE = 1 / math.sqrt(12)

# after isotropy the q = 2 level equals 1/sqrt(2) everywhere, so starts rarely improve
pytestmark = pytest.mark.filterwarnings("ignore:no search start improved")


@pytest.fixture(scope="module")
def cube4():
    return sample_uniform(B.Cube(4), 1_000_000, 99)


@pytest.fixture(scope="module")
def iso_cube8():
    return isotropize(sample_uniform(B.Cube(8), 40_000, 5))[1]


def _midpoint_uniform(N):
    """Deterministic stand-in for U(-1/2, 1/2): the midpoint grid."""
    return SampleCloud(((np.arange(N) + 0.5) / N - 0.5)[:, None], 0)


# -- hull body support ---------------------------------------------------------


def test_t_support_cube_levels(cube4):
    spec = t_body(cube4, L_CUBE)
    vals, ses = t_support_levels(spec, [1, 0, 0, 0])
    exact = np.array([L_CUBE / (math.sqrt(2) * L_CUBE), (1 / 80) ** 0.25 / (4 * L_CUBE)])
    assert exact == pytest.approx([0.7071, 0.2896], abs=1e-4)
    assert np.all(np.abs(vals[:, 0] - exact) <= 3 * ses[:, 0])
    assert t_support(spec, [1, 0, 0, 0]) == vals[:, 0].max()


def test_t_support_rejects_zero(cube4):
    spec = t_body(cube4, L_CUBE)
    with pytest.raises(ValueError):
        t_support(spec, np.zeros(4))


def test_t_body_checks():
    X = sample_uniform(B.Cube(16), 200, 0)
    with pytest.raises(UntrustedOrderError, match="N >="):
        t_body(X, 1.0)
    spec = t_body(X, 1.0, trust="flag")
    assert [2**i for i in spec.untrusted_levels] == [16]
    with pytest.raises(ValueError):
        t_body(sample_uniform(B.Cube(1), 100, 0), 1.0)
    with pytest.raises(ValueError):
        t_body(X, 0.0, trust="flag")


@settings(max_examples=40, deadline=None)
@given(x=st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 1e-3),
       lam=st.floats(1e-3, 1e3))
def test_t_support_homogeneous(x, lam):
    spec = t_body(HOMOG_CLOUD, L_CUBE)
    assert t_support(spec, np.multiply(lam, x)) == pytest.approx(lam * t_support(spec, x), rel=1e-12)


HOMOG_CLOUD = sample_uniform(B.Simplex(4), 20_000, 3)


# -- direction search --------------------------------------------------------------


def test_ball_objective_is_rotation_invariant():
    iso = isotropize(sample_uniform(B.normalized(B.Ball(4)), 100_000, 1))[1]
    spec = t_body(iso, 1.0)
    D = np.random.default_rng(0).standard_normal((100, 4))
    vals, ses = t_support_levels(spec, D / np.linalg.norm(D, axis=1, keepdims=True))
    top = vals.max(axis=0)
    se = ses[np.argmax(vals, axis=0), np.arange(100)].max()
    assert top.max() - top.min() <= 5 * se + 1e-12


def test_find_direction_cube8(iso_cube8):
    cfg = SearchConfig(starts=4, seed=1, probes=(np.eye(8)[0], np.ones(8)))
    rep = find_direction(iso_cube8, 1.0, cfg)
    assert np.linalg.norm(rep.theta) == pytest.approx(1.0, abs=1e-12)
    spec = t_body(iso_cube8, 1.0)
    assert rep.objective <= t_support(spec, np.eye(8)[0]) + 1e-12
    assert rep.objective <= t_support(spec, np.ones(8) / math.sqrt(8)) + 1e-12
    # each level obeys the objective bound
    for lv in rep.level_values:
        m = lv["value"] * lv["level"] * 2 ** (lv["level"] / 2)
        assert m <= rep.objective * lv["level"] * 2 ** (lv["level"] / 2) + 1e-12
    e1_growth, table = moment_growth_check(iso_cube8, np.eye(8)[0])
    se = max(r["se"] for r in table)
    assert rep.growth_constant <= e1_growth + 2 * se
    tails = [r["tail"] for r in rep.tail_table]
    assert all(a >= b for a, b in zip(tails, tails[1:]))
    assert rep.starts == 6 and rep.log_convention.startswith("natural")


def test_find_direction_deterministic(iso_cube8):
    cfg = SearchConfig(starts=3, seed=7)
    a = find_direction(iso_cube8, 1.0, cfg)
    b = find_direction(iso_cube8, 1.0, SearchConfig(starts=3, seed=7, workers=3))
    assert a.to_json() == b.to_json()


@pytest.mark.filterwarnings("default")
def test_flat_objective_warns(iso_cube8):
    with pytest.warns(RuntimeWarning, match="no search start improved"):
        rep = find_direction(iso_cube8, 1.0, SearchConfig(starts=2, seed=0))
    assert not rep.improved
    assert rep.objective == pytest.approx(1 / math.sqrt(2), rel=1e-12)


def test_find_direction_rotation(iso_cube8):
    Q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((8, 8)))
    rot = SampleCloud(iso_cube8.points @ Q.T, 0)
    a = find_direction(iso_cube8, 1.0, SearchConfig(starts=2, seed=0))
    b = find_direction(rot, 1.0, SearchConfig(starts=2, seed=0))
    assert abs(a.objective - b.objective) <= 2 * max(a.objective_se, b.objective_se) + 1e-12


def test_find_direction_prefers_light_tail():
    rng = np.random.default_rng(4)
    X = np.column_stack([rng.random(50_000) - 0.5, rng.exponential(1.0, 50_000) - 1.0])
    iso = isotropize(SampleCloud(X, 0))[1]
    rep = find_direction(iso, 1.0, SearchConfig(starts=4, seed=0, probes=([0, 1.0],)))
    heavy = t_support(t_body(iso, 1.0), [0, 1.0])
    assert rep.objective <= heavy + 1e-12


def test_report_json(iso_cube8):
    rep = find_direction(iso_cube8, 1.0, SearchConfig(starts=1, seed=0))
    d = json.loads(rep.to_json())
    for key in ("theta", "objective", "psi2_proxy", "growth_constant", "tail_table", "fitted_c", "seed", "N", "body_hash"):
        assert key in d
    assert d["N"] == 40_000 and len(d["theta"]) == 8


# -- tails ------------------------------------------------------------------------


def test_tail_examples():
    prof = tail_profile(_midpoint_uniform(1_000_000), [1.0], [1.0, 1.5, 2.0, 3.0])
    tails = [r["tail"] for r in prof.rows]
    assert tails == pytest.approx([0.5, 0.25, 0.0, 0.0], abs=1e-5)
    assert [r["used"] for r in prof.rows] == [True, True, False, False]
    assert prof.fitted_c == pytest.approx(min(-math.log(0.5) * math.log(2) ** 2, -math.log(0.25) * math.log(2.5) ** 2 / 2.25), rel=1e-4)
    assert prof.to_csv().startswith("t,tail,exceedances,bound,used\n")


def test_tail_errors():
    with pytest.raises(ValueError):
        tail_profile(SampleCloud(np.zeros((50, 1)), 0), [1.0])
    with pytest.raises(ValueError):
        tail_profile(_midpoint_uniform(100), [1.0], [0.5])


@settings(max_examples=30, deadline=None)
@given(grid=st.lists(st.floats(1, 10), min_size=2, max_size=12, unique=True))
def test_tails_nonincreasing(grid):
    prof = tail_profile(HOMOG_CLOUD, [1, 2, 0, -1], grid)
    tails = [r["tail"] for r in prof.rows]
    assert all(a >= b for a, b in zip(tails, tails[1:]))


# -- moment growth --------------------------------------------------------------


def test_growth_cube_coordinate(cube4):
    growth, table = moment_growth_check(cube4, [1, 0, 0, 0], 4)
    by_q = {r["q"]: r for r in table}
    assert (1 / 80) ** 0.25 / (2 * math.log(5) * L_CUBE) == pytest.approx(0.359844, abs=1e-6)
    assert abs(by_q[4]["ratio"] - 0.359844) <= 3 * by_q[4]["se"] / (2 * math.log(5) * L_CUBE)
    assert growth == pytest.approx(1 / (math.sqrt(2) * math.log(3)), rel=1e-12)
    assert growth == pytest.approx(0.643636, abs=1e-6)


def test_growth_gaussian():
    g = sample_logconcave(LogConcaveSpec.gaussian([[1.0]]), 1_000_000, 3)
    growth, table = moment_growth_check(g, [1.0], 16)
    assert [r["q"] for r in table] == [2, 4, 8, 16]
    for r in table:
        q = r["q"]
        exact = math.sqrt(2) * (gamma((q + 1) / 2) / math.sqrt(math.pi)) ** (1 / q) / (math.sqrt(q) * math.log(q + 1))
        assert exact <= 1
        assert r["ratio"] == pytest.approx(exact, rel=0.01)
    assert growth <= 1


def test_growth_scale_invariant(cube4):
    a = moment_growth_check(cube4, [1, 2, 0, 0], 4)[0]
    b = moment_growth_check(SampleCloud(7.5 * cube4.points, 0), [1, 2, 0, 0], 4)[0]
    assert a == pytest.approx(b, rel=1e-12)


def test_growth_errors(cube4):
    with pytest.raises(ValueError, match="trusted"):
        moment_growth_check(cube4, [1, 0, 0, 0], 64)
    with pytest.raises(ValueError):
        moment_growth_check(SampleCloud(np.zeros((100, 2)), 0), [1, 0], 2)


# -- Euclidean moments ---------------------------------------------------------


def test_euclidean_moment_examples():
    v, se = euclidean_moment(sample_uniform(B.Cube(2), 1_000_000, 1), 2)
    assert abs(v - math.sqrt(2 / 12)) <= 3 * se
    r, n = 1.7, 5
    v, se = euclidean_moment(sample_uniform(B.Ball(n, r), 1_000_000, 2), 2)
    assert abs(v - r * math.sqrt(n / (n + 2))) <= 3 * se


def test_euclidean_ratio_cube(cube4):
    for q in (2, 3, 4, 8):
        ratio, _ = euclidean_moment_ratio(cube4, q, L_CUBE)
        assert 1 - 1e-3 <= ratio <= 3
    with pytest.raises(ValueError):
        euclidean_moment(SampleCloud(np.ones((10, 2)), 0), 8)
