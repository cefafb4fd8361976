import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import closure, complex_from_set, dense_betti, random_abstract_complex, simplices_by_dim, union_find_count
from randcech.cech import cech_complex, cech_filtration
from randcech.errors import InsufficientComplex, InvalidArgument
from randcech.homology import (
    betti_diff_bound_check,
    betti_numbers,
    connected_components,
    euler_characteristic,
    persistence,
    persistent_betti,
)


def test_hexagon_betti(hexagon):
    cx = cech_complex(hexagon, 0.55)
    assert betti_numbers(cx).tolist() == [1, 1]
    assert connected_components(cx) == 1
    assert euler_characteristic(cx) == 0


def test_full_simplex_is_contractible():
    cx = complex_from_set(closure([(0, 1, 2, 3)]), 3)
    assert betti_numbers(cx, 2).tolist() == [1, 0, 0]
    assert euler_characteristic(cx) == 1


def test_two_disjoint_edges():
    cx = complex_from_set(closure([(0, 1), (2, 3)]), 2)
    assert betti_numbers(cx, 1).tolist() == [2, 0]


def test_isolated_vertices_and_empty_complex():
    cx = complex_from_set({(v,) for v in range(7)}, 1)
    assert connected_components(cx) == 7
    empty = cech_complex(np.empty((0, 2)), 1.0)
    assert euler_characteristic(empty) == 0
    assert betti_numbers(empty).tolist() == [0, 0]


def test_hollow_tetrahedron_is_a_sphere():
    faces = closure(itertools.combinations(range(4), 3))
    cx = complex_from_set(faces, 3)
    assert betti_numbers(cx, 2).tolist() == [1, 0, 1]


def test_truncated_complex_is_rejected(hexagon):
    cx = cech_complex(hexagon, 2.0, max_dim=1)
    with pytest.raises(InsufficientComplex):
        betti_numbers(cx, 1)


def test_persistent_betti_hexagon(hexagon):
    f = cech_filtration(hexagon, max_dim=2, r_max=1.2)
    assert persistent_betti(f, 1, 0.55, 0.55) == 1
    assert persistent_betti(f, 0, 0.0, 1.2) == 1
    assert persistent_betti(f, 0, 0.0, 0.0) == 6
    with pytest.raises(InvalidArgument):
        persistent_betti(f, 1, 0.6, 0.5)


def test_bound_check_examples(hexagon):
    cycle = cech_complex(hexagon, 0.55)
    assert betti_diff_bound_check(cycle, cycle, 1) == (0, 0, True)
    path_edges = [tuple(e) for e in cycle.simplices[1] if tuple(e) != (0, 5)]
    path = complex_from_set({(v,) for v in range(6)} | set(path_edges), 2)
    assert betti_diff_bound_check(path, cycle, 1) == (1, 1, True)
    with pytest.raises(InvalidArgument):
        betti_diff_bound_check(cycle, path, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_reduction_matches_dense_elimination(n, max_dim, seed):
    faces = random_abstract_complex(np.random.default_rng(seed), n, max_dim)
    cx = complex_from_set(faces, max_dim + 1, seed=seed)
    expect = dense_betti(simplices_by_dim(faces, max_dim + 1), max_dim)
    assert betti_numbers(cx, max_dim).tolist() == expect


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.floats(0.02, 0.6), st.integers(0, 2**32 - 1))
def test_clearing_does_not_change_pairs(n, r, seed):
    P = np.random.default_rng(seed).random((n, 2))
    cx = cech_complex(P, r, max_dim=3)
    a, b = persistence(cx, clearing=True), persistence(cx, clearing=False)
    np.testing.assert_array_equal(a.partner, b.partner)
    np.testing.assert_array_equal(a.is_birth, b.is_birth)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.floats(0.02, 0.5), st.integers(0, 2**32 - 1))
def test_union_find_matches_reduction(n, r, seed):
    P = np.random.default_rng(seed).random((n, 2))
    cx = cech_complex(P, r, max_dim=2)
    uf = union_find_count(n, cx.simplices[1])
    assert connected_components(cx) == uf == betti_numbers(cx, 1)[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_euler_relation(n, max_dim, seed):
    faces = random_abstract_complex(np.random.default_rng(seed), n, max_dim)
    cx = complex_from_set(faces, max_dim + 1)
    b = betti_numbers(cx, max_dim)
    assert sum((-1) ** k * b[k] for k in range(max_dim + 1)) == euler_characteristic(cx)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.integers(1, 40), st.floats(0.05, 0.6), st.integers(0, 2**32 - 1))
def test_no_homology_at_or_above_ambient_dimension(d, n, r, seed):
    P = np.random.default_rng(seed).random((n, d))
    cx = cech_complex(P, r, max_dim=d + 1)
    assert betti_numbers(cx, d)[d] == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_persistent_betti_on_the_diagonal(n, seed):
    rng = np.random.default_rng(seed)
    P = rng.random((n, 2))
    f = cech_filtration(P, max_dim=2, r_max=0.5)
    pers = persistence(f)
    for t in rng.uniform(0, 0.5, size=5):
        for k in (0, 1):
            sub = f.threshold(t)
            assert persistent_betti(f, k, t, t, pers) == betti_numbers(sub, k)[k]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_persistent_betti_is_monotone(n, seed):
    rng = np.random.default_rng(seed)
    f = cech_filtration(rng.random((n, 2)), max_dim=2, r_max=0.5)
    s, t, u = np.sort(rng.uniform(0, 0.5, size=3))
    for k in (0, 1):
        assert persistent_betti(f, k, s, u) <= persistent_betti(f, k, s, t)
        assert persistent_betti(f, k, s, u) <= persistent_betti(f, k, t, u)
