import math

import numpy as np
import pytest

from randcech.cech import cech_complex
from randcech.errors import InvalidArgument, ResourceCapExceeded
from randcech.geometry import circle_atlas, weighted_norm
from randcech.harness import (
    ExperimentConfig,
    dispersion_trend,
    estimate_beta_hat,
    estimate_expected_simplex_limit,
    nested_bound_holds,
    run_convergence,
    run_coupling_gap,
    run_lln_curve,
    sample_cloud,
    simplex_limit_target,
    uniform_config,
)
from randcech.homology import betti_numbers
from randcech.sampling import uniform_box


def test_config_validation():
    with pytest.raises(InvalidArgument):
        uniform_config(2, 100, [0.5, 0.3])
    with pytest.raises(InvalidArgument):
        uniform_config(2, 100, [])
    with pytest.raises(InvalidArgument):
        ExperimentConfig("euclidean", 100, (0.5,))
    with pytest.raises(InvalidArgument):
        ExperimentConfig("manifold", 100, (0.5,))
    with pytest.raises(InvalidArgument):
        ExperimentConfig("euclidean", 100, (0.5,), density=uniform_box([0], [1]), metric=weighted_norm(np.eye(2)))


def test_dimensions_follow_the_setting():
    cfg = uniform_config(3, 100, [0.5], k_max=1)
    assert (cfg.intrinsic_dim, cfg.ambient_dim, cfg.build_dim, cfg.betti_dim) == (3, 3, 3, 2)
    man = ExperimentConfig("manifold", 100, (1.0,), atlas=circle_atlas())
    assert (man.intrinsic_dim, man.ambient_dim) == (1, 2)
    assert man.radius_at(1.0) == pytest.approx(0.01)
    assert cfg.radius_at(0.5, 1000) == pytest.approx(0.05)


def test_records_have_expected_shapes():
    cfg = uniform_config(2, 300, [0.3, 0.6], trials=3, seed=1)
    recs = run_lln_curve(cfg)
    assert [r.r for r in recs] == [0.3, 0.6]
    for rec in recs:
        assert rec.betti.shape == (3, 2)
        assert rec.simplices.shape == (3, 3)
        assert rec.chi.shape == (3,)
        np.testing.assert_allclose(rec.chi, rec.betti[:, 0] - rec.betti[:, 1])
        assert rec.rows()[-1][1] == "chi"


def test_runs_are_deterministic_across_worker_counts():
    a = run_lln_curve(uniform_config(2, 400, [0.5], trials=4, seed=7))
    b = run_lln_curve(uniform_config(2, 400, [0.5], trials=4, seed=7, workers=3))
    np.testing.assert_array_equal(a[0].betti, b[0].betti)
    np.testing.assert_array_equal(a[0].simplices, b[0].simplices)
    np.testing.assert_array_equal(a[0].chi, b[0].chi)


def test_regime_wiring_matches_rescaled_cloud():
    cfg = uniform_config(2, 200, [0.7], trials=1, seed=3)
    cloud = sample_cloud(cfg, (0, 0, 0))
    direct = cech_complex(cloud, cfg.radius_at(0.7), max_dim=2)
    rescaled = cech_complex(cloud.points * math.sqrt(200), 0.7, max_dim=2)
    assert direct.simplex_set() == rescaled.simplex_set()
    rec = run_lln_curve(cfg)[0]
    np.testing.assert_array_equal(rec.simplices[0] * 200, rescaled.counts())


def test_tiny_radius_leaves_isolated_points():
    rec = run_lln_curve(uniform_config(2, 500, [1e-6], trials=2))[0]
    np.testing.assert_array_equal(rec.betti[:, 0], 1.0)
    np.testing.assert_array_equal(rec.betti[:, 1], 0.0)
    np.testing.assert_array_equal(rec.simplices[:, 1], 0.0)


def test_convergence_and_dispersion():
    cfg = uniform_config(2, 100, [0.6], trials=8, seed=2)
    res = run_convergence(cfg, [200, 2000])
    trend = dispersion_trend(res, "chi")
    assert [t[0] for t in trend] == [200, 2000]
    assert trend[1][3] < trend[0][3]
    again = run_convergence(cfg, [200, 2000])
    np.testing.assert_array_equal(res[2000][0].chi, again[2000][0].chi)
    with pytest.raises(InvalidArgument):
        run_convergence(cfg, [2000, 200])


def test_beta_hat_zero_intensity():
    est = estimate_beta_hat(0.0, 0.5, 100.0, trials=3)
    assert all(b.value == 0 for b in est.beta)
    with pytest.raises(InvalidArgument):
        estimate_beta_hat(1.0, 0.5, 5.0)


def test_beta_hat_euler_consistency():
    est = estimate_beta_hat(1.0, 0.5, 2000.0, N=2, trials=10, seed=4)
    from randcech.limits import euler_limit

    assert abs(est.euler.value - euler_limit(2, 0.5)) <= max(4 * est.euler.stderr, 0.02)


def test_coupling_gap():
    cfg = uniform_config(2, 100, [0.8], trials=10, seed=5)
    recs = run_coupling_gap(cfg, [300, 3000])
    for rec in recs:
        assert rec.bound_ok.all()
        same = rec.n_used == rec.n
        assert np.all(rec.gap[same] == 0)
    assert recs[1].mean_gap < recs[0].mean_gap


def test_expected_edge_density_and_targets():
    cfg = uniform_config(2, 2000, [0.5], trials=5, seed=6, k_max=0, euler=False)
    est = estimate_expected_simplex_limit(cfg, 1)[0]
    target = simplex_limit_target(cfg, 1, 0.5)
    assert target == pytest.approx(math.pi / 2)
    # boundary effects shrink edge counts by O(r_n); allow for that at this small n
    assert abs(est.value - target) <= max(4 * est.stderr, 0.06)
    circle = ExperimentConfig("manifold", 1000, (1.0,), atlas=circle_atlas(), trials=2)
    assert simplex_limit_target(circle, 1, 1.0) == pytest.approx(2 / (2 * math.pi), rel=1e-6)


def test_weighted_metric_target_scales_by_determinant():
    B = np.diag([2.0, 1.0])
    cfg = uniform_config(2, 1000, [0.5], metric=weighted_norm(B))
    assert simplex_limit_target(cfg, 1, 0.5) == pytest.approx(math.pi / 4)


def test_nested_bound_in_the_pipeline():
    cfg = uniform_config(2, 300, [0.4, 0.9], trials=1, seed=8)
    for k in (0, 1):
        lhs, rhs, ok = nested_bound_holds(cfg, (0, 0, 0), 0.4, 0.9, k)
        assert ok and lhs <= rhs


def test_cap_aborts_the_trial():
    cfg = uniform_config(2, 2000, [2.0], trials=1, cap=5000)
    with pytest.raises(ResourceCapExceeded):
        run_lln_curve(cfg)


def test_circle_run_reports_no_loops_at_moderate_radius():
    cfg = ExperimentConfig("manifold", 2000, (1.0,), atlas=circle_atlas(), trials=3, master_seed=1)
    rec = run_lln_curve(cfg)[0]
    assert rec.stat("beta", 1)[0] <= 1 / 2000
