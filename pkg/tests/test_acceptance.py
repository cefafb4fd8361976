"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are collected again in the
terminal summary under "acceptance criteria".
"""

import math

import numpy as np
import pytest

from oracles import brute_miniball_radius, complex_from_set, dense_betti, random_abstract_complex, simplices_by_dim, union_find_count
from randcech.cech import cech_complex, cech_filtration, miniball_radius
from randcech.geometry import circle_atlas
from randcech.harness import ExperimentConfig, estimate_beta_hat, run_coupling_gap, run_lln_curve, uniform_config
from randcech.homology import betti_diff_bound_check, betti_numbers, persistence, persistent_betti
from randcech.limits import a_j_constant, euler_limit

pytestmark = pytest.mark.slow

SEED = 2024
N_POINTS = 10_000
TRIALS = 20


def _euler_band(verdict, number, N, radii, floor):
    recs = run_lln_curve(uniform_config(N, N_POINTS, radii, trials=TRIALS, seed=SEED))
    parts, ok = [], True
    for rec in recs:
        mean, se = rec.stat("chi")
        target = euler_limit(N, rec.r)
        tol = max(floor, 4 * se)
        good = abs(mean - target) <= tol
        ok &= good
        parts.append(f"r={rec.r}: {mean:.4f}±{se:.4f} vs {target:.4f} (|d|={abs(mean - target):.4f}, tol {tol:.3f}{'' if good else ', OUT'})")
    verdict(number, f"Euler curve N={N}", ok, "; ".join(parts))


def test_criterion_01_euler_curve_plane(verdict):
    _euler_band(verdict, 1, 2, [0.3, 0.6, 1.0], 0.02)


def test_criterion_02_euler_curve_space(verdict):
    _euler_band(verdict, 2, 3, [0.3, 0.5], 0.03)


def test_criterion_03_edge_density(verdict):
    cfg = uniform_config(2, N_POINTS, [0.5], trials=TRIALS, seed=SEED, k_max=0, euler=False)
    mean, se = run_lln_curve(cfg)[0].stat("S", 1)
    target = a_j_constant(2, 1, 0.5).value
    verdict(3, "edge density S_1/n", abs(mean - target) <= 4 * se,
            f"{mean:.4f}±{se:.4f} vs pi/2={target:.4f} (|d|={abs(mean - target):.4f}, tol {4 * se:.4f})")


def test_criterion_04_circle_components(verdict):
    cfg = ExperimentConfig("manifold", N_POINTS, (1.0,), trials=TRIALS, master_seed=SEED, atlas=circle_atlas())
    rec = run_lln_curve(cfg)[0]
    b0, se0 = rec.stat("beta", 0)
    b1, _ = rec.stat("beta", 1)
    target = math.exp(-1 / math.pi)
    tol = max(0.01, 4 * se0)
    ok = abs(b0 - target) <= tol and b1 <= 2e-4
    verdict(4, "circle beta_0/n and beta_1/n", ok,
            f"beta0/n={b0:.4f}±{se0:.4f} vs {target:.4f} (tol {tol:.3f}); beta1/n={b1:.2e} (<= 2e-4)")


def test_criterion_05_scaling_property(verdict):
    a = estimate_beta_hat(1.0, 0.5, 1e4, N=2, trials=TRIALS, seed=SEED)
    b = estimate_beta_hat(4.0, 0.25, 1e4, N=2, trials=TRIALS, seed=SEED + 1)
    parts, ok = [], True
    for k in (0, 1):
        x, y = a.beta[k], b.beta[k]
        diff = abs(x.value - y.value / 4)
        tol = 3 * math.hypot(x.stderr, y.stderr / 4)
        ok &= diff <= tol
        parts.append(f"k={k}: {x.value:.5f} vs {y.value / 4:.5f} (|d|={diff:.5f}, tol {tol:.5f})")
    verdict(5, "scaling beta_hat(1,0.5) = beta_hat(4,0.25)/4", ok, "; ".join(parts))


def test_criterion_06_nerve_vanishing(verdict):
    rng = np.random.default_rng(SEED)
    bad = 0
    for i in range(100):
        N = 2 + i % 2
        P = rng.random((int(rng.integers(5, 60)), N))
        r = float(rng.uniform(0.05, 0.5))
        cx = cech_complex(P, r, max_dim=N + 1)
        bad += betti_numbers(cx, N)[N] != 0
        deeper = cech_complex(P, r, max_dim=N + 2)
        bad += betti_numbers(deeper, N + 1)[N + 1] != 0
    verdict(6, "beta_k = 0 for k >= N", bad == 0, f"{bad} nonzero values over 100 clouds")


def test_criterion_07_components_oracle(verdict):
    rng = np.random.default_rng(SEED + 7)
    bad = 0
    for i in range(200):
        N = 2 + i % 2
        n = int(rng.integers(1, 80))
        cx = cech_complex(rng.random((n, N)), float(rng.uniform(0.01, 0.4)), max_dim=2)
        bad += union_find_count(n, cx.simplices[1]) != betti_numbers(cx, 1)[0]
    verdict(7, "union-find = reduction beta_0", bad == 0, f"{bad} mismatches over 200 complexes")


def test_criterion_08_betti_difference_bound(verdict):
    rng = np.random.default_rng(SEED + 8)
    bad = 0
    for i in range(100):
        N = 2 + i % 2
        P = rng.random((int(rng.integers(5, 60)), N))
        r, r2 = np.sort(rng.uniform(0.02, 0.45, size=2))
        big = cech_complex(P, r2, max_dim=3)
        small = big.threshold(r)
        for k in (0, 1):
            bad += not betti_diff_bound_check(small, big, k)[2]
    verdict(8, "nested Betti difference bound", bad == 0, f"{bad} violations over 100 pairs x 2 degrees")


def test_criterion_09_coupling_gap(verdict):
    cfg = uniform_config(2, 1000, [1.0], trials=TRIALS, seed=SEED)
    small, big = run_coupling_gap(cfg, [1000, 10_000])
    exact = all(np.all(rec.gap[rec.n_used == rec.n] == 0) for rec in (small, big))
    ok = big.mean_gap < small.mean_gap and exact
    verdict(9, "binomial/Poisson coupling gap", ok,
            f"mean gap {small.mean_gap:.4f} (n=1e3) -> {big.mean_gap:.4f} (n=1e4); zero when N_n=n: {exact}")


def test_criterion_10_dense_homology_oracle(verdict):
    rng = np.random.default_rng(SEED + 10)
    bad = 0
    for _ in range(50):
        n = int(rng.integers(1, 13))
        dim = int(rng.integers(1, 4))
        faces = random_abstract_complex(rng, n, dim)
        cx = complex_from_set(faces, dim + 1, seed=int(rng.integers(2**31)))
        bad += betti_numbers(cx, dim).tolist() != dense_betti(simplices_by_dim(faces, dim + 1), dim)
    verdict(10, "sparse = dense Z/2 Betti numbers", bad == 0, f"{bad} mismatches over 50 complexes")


def test_criterion_11_miniball_oracle(verdict):
    rng = np.random.default_rng(SEED + 11)
    worst = 0.0
    for _ in range(1000):
        P = rng.normal(size=(int(rng.integers(1, 6)), int(rng.integers(1, 4))))
        worst = max(worst, abs(miniball_radius(P) - brute_miniball_radius(P)))
    verdict(11, "Welzl vs support enumeration", worst <= 1e-9, f"max |d| = {worst:.2e} over 1000 sets")


def test_criterion_12_persistent_betti_diagonal(verdict):
    rng = np.random.default_rng(SEED + 12)
    bad = 0
    for i in range(50):
        N = 2 + i % 2
        f = cech_filtration(rng.random((int(rng.integers(3, 50)), N)), max_dim=N, r_max=0.5)
        pers = persistence(f)
        for t in rng.uniform(0, 0.5, size=5):
            for k in range(N):
                bad += persistent_betti(f, k, t, t, pers) != betti_numbers(f.threshold(t), k)[k]
    verdict(12, "persistent beta^{t,t} = beta(K_t)", bad == 0, f"{bad} mismatches over 50 filtrations x 5 t")
