import math

import numpy as np
import pytest

from randcech.errors import InsufficientSamples, InvalidArgument, UnsupportedDimension
from randcech.geometry import circle_atlas
from randcech.limits import (
    LimitEstimate,
    a2_plane_quadrature,
    a_j_constant,
    beta0_limit_1d,
    decay_envelope,
    euler_limit,
    manifold_limit_integral,
    s_hat_limit,
    scaling_map,
)


def test_edge_constant_closed_form():
    a = a_j_constant(2, 1, 0.5)
    assert a.value == pytest.approx(math.pi / 2)
    assert a.stderr == 0 and a.method == "closed-form"
    assert a_j_constant(3, 1, 1.0).value == pytest.approx(16 * math.pi / 3)
    assert a_j_constant(1, 1, 0.7).value == pytest.approx(2 * 0.7)


def test_edge_constant_monte_carlo_agrees_with_closed_form():
    mc = a_j_constant(2, 1, 0.5, mc_samples=20_000, force_mc=True, seed=3)
    assert abs(mc.value - math.pi / 2) <= 4 * mc.stderr + 1e-12


def test_triangle_constant_against_plane_quadrature():
    # the grid oracle is independent of the miniball code; its exact limit is 14.8044
    grid = a2_plane_quadrature(1.0, 200)
    assert grid == pytest.approx(14.807, abs=2e-3)
    mc = a_j_constant(2, 2, 1.0, mc_samples=50_000, seed=1)
    assert abs(mc.value - grid) <= 4 * mc.stderr
    assert a_j_constant(2, 2, 0.5, mc_samples=50_000, seed=1).value == pytest.approx(mc.value / 16)


def test_too_few_monte_carlo_samples():
    with pytest.raises(InsufficientSamples):
        a_j_constant(2, 2, 1.0, mc_samples=999)


def test_s_hat_limit():
    assert s_hat_limit(2, 1, 0.0, 0.5) == 0.0
    assert s_hat_limit(2, 1, 1.0, 0.5) == pytest.approx(math.pi / 2)
    assert s_hat_limit(2, 1, 2.0, 0.5) == pytest.approx(4 * math.pi / 2)


def test_euler_limit_values():
    assert euler_limit(2, 1e-9) == pytest.approx(1.0)
    assert euler_limit(2, 0.3) == pytest.approx(0.540606, abs=1e-6)
    assert euler_limit(2, 0.6) == pytest.approx(-0.0422676, abs=1e-7)
    assert euler_limit(2, 1.0) == pytest.approx(-0.0925466, abs=1e-7)
    assert euler_limit(3, 0.5) == pytest.approx(-0.1878611, abs=1e-7)
    with pytest.raises(UnsupportedDimension):
        euler_limit(4, 0.5)


def test_euler_limit_matches_boolean_model_densities():
    # Euler density of a union of unit-intensity balls: e^{-V} (1 - V) in the plane with V = area
    for r in (0.2, 0.5, 0.9):
        V = math.pi * r * r
        assert euler_limit(2, r) == pytest.approx(math.exp(-V) * (1 - V))


def test_beta0_on_the_line():
    assert beta0_limit_1d(1.0, 0.0) == 1.0
    assert beta0_limit_1d(1.0, 0.5) == pytest.approx(math.exp(-1))


def test_scaling_map():
    assert scaling_map(3.0, 0.7, 1.0, 2) == (3.0, 0.7, 1.0)
    lam, r, factor = scaling_map(1.5, 1.0, 4.0, 2)
    assert (lam, r, factor) == pytest.approx((6.0, 0.5, 0.25))
    with pytest.raises(InvalidArgument):
        scaling_map(1.0, 1.0, 0.0, 2)


def test_decay_envelope():
    assert decay_envelope(2, 1, 1e-6) == pytest.approx(0.0, abs=1e-10)
    assert decay_envelope(2, 1, 1.0) == pytest.approx(math.pi**2 * math.exp(-math.pi**2))
    assert decay_envelope(2, 1, 1.0) == pytest.approx(5.11e-4, rel=2e-3)
    with pytest.raises(InvalidArgument):
        decay_envelope(2, 2, 1.0)


def test_manifold_limit_integral_on_circle():
    at = circle_atlas()
    assert manifold_limit_integral(at, lambda k: np.ones_like(k)) == pytest.approx(2 * math.pi, rel=1e-9)
    assert manifold_limit_integral(at, lambda k: k**2) == pytest.approx(1 / (2 * math.pi), rel=1e-9)
    # circle beta_0 target at r = 1: integral of kappa exp(-2 kappa) over the circle
    target = manifold_limit_integral(at, lambda k: k * np.exp(-2.0 * k))
    assert target == pytest.approx(math.exp(-1 / math.pi), rel=1e-9)


def test_limit_estimate_validation():
    with pytest.raises(InvalidArgument):
        LimitEstimate(1.0, -0.1, 10, "monte-carlo")
    with pytest.raises(InvalidArgument):
        LimitEstimate(1.0, 0.1, 0, "closed-form")
