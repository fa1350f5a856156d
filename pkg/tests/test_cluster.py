import numpy as np
import pytest

import reference as ref
from percolab.cluster import (CENSORED, SimFrame, build, diam_tail_indicator, diameter,
                              one_arm_indicator, r_fb, r_world, r_zb, s_n)
from percolab.lattice import BoxSpec, EdgeId, interior_edges, vertex_index
from percolab.percolation import EdgeSampler, RestrictedConfig


def _path_states(*edges):
    opened = set(edges)
    return lambda e: e in opened


def test_two_open_bonds_form_one_cluster():
    box = BoxSpec(2, 2)
    f = build(box, _path_states(EdgeId((0, 0), 0), EdgeId((1, 0), 1)))
    r = f.find((0, 0))
    assert f.find((1, 0)) == r == f.find((1, 1))
    assert f.extents(r) == [(0, 1), (0, 1)]
    assert diameter(f, r) == 1
    assert int(f.size[r]) == 3
    assert not f.touches_outer[r]


def test_straight_path_observables():
    # open path (-2,0) .. (2,0) in B_3 with n = 1: it crosses B_1 but stays finite
    edges = [EdgeId((x, 0), 0) for x in range(-2, 2)]
    frame = SimFrame.with_margin(2, 1, 2)
    states = _path_states(*edges)
    f = build(frame, states)
    assert r_fb(frame, f) == 4
    inner = build(frame.inner, states)
    assert r_zb(frame, f, inner) == 2
    assert diam_tail_indicator(frame, f, 4) == 1
    assert diam_tail_indicator(frame, f, 5) == 0
    assert one_arm_indicator(frame, f) == 1


def test_path_to_boundary_is_censored():
    edges = [EdgeId((x, 0), 0) for x in range(0, 3)]
    frame = SimFrame.with_margin(2, 1, 2)
    f = build(frame, _path_states(*edges))
    assert diam_tail_indicator(frame, f, 1) == CENSORED
    assert r_fb(frame, f) == 0
    assert one_arm_indicator(frame, f, finite_only=True) == 0
    assert one_arm_indicator(frame, f, finite_only=False) == 1


def test_s_n_counts_inner_vertices_of_long_clusters():
    edges = [EdgeId((x, 0), 0) for x in range(-3, 3)]
    frame = SimFrame.with_margin(2, 2, 2)
    f = build(frame, _path_states(*edges))
    # diameter 6 > 2 log 2; five of its vertices lie in B_2
    assert s_n(frame, f, 2.0) == 5
    assert s_n(frame, f, 10.0) == 0


def test_closed_world_has_no_diameter():
    frame = SimFrame.with_margin(2, 3, 2)
    f = build(frame, EdgeSampler(1, 0.0))
    assert r_fb(frame, f) == 0
    assert len(f.roots()) == frame.outer.num_vertices


def test_open_world_touches_boundary():
    frame = SimFrame.with_margin(2, 3, 2)
    f = build(frame, EdgeSampler(1, 1.0))
    assert len(f.roots()) == 1
    assert r_fb(frame, f) == 0
    assert r_world(frame.outer, f) == 2 * frame.outer.n


def test_root_checks():
    f = build(BoxSpec(2, 1), EdgeSampler(0, 1.0))
    nonroot = next(i for i in range(9) if not f.is_root(i))
    with pytest.raises(ValueError):
        f.extents(nonroot)


def test_s_n_needs_n_at_least_two():
    frame = SimFrame.with_margin(2, 1, 2)
    with pytest.raises(ValueError):
        s_n(frame, build(frame, EdgeSampler(0, 0.5)), 1.0)


@pytest.mark.parametrize("seed", range(40))
def test_forest_matches_breadth_first_search(seed):
    rng = np.random.default_rng(seed)
    d = 2 if seed % 4 else 3
    N = int(rng.integers(1, 7 if d == 2 else 3))
    p = float(rng.choice([0.2, 0.5, 0.8]))
    box = BoxSpec(d, N)
    sampler = EdgeSampler(seed, p)
    f = build(box, sampler)
    expected = ref.clusters(box, sampler.state)
    assert len(f.roots()) == len(expected)
    for comp, touch in expected:
        r = f.find(comp[0])
        assert all(f.find(v) == r for v in comp)
        assert int(f.size[r]) == len(comp)
        assert f.extents(r) == ref.extents(comp)
        assert bool(f.touches_outer[r]) == touch


@pytest.mark.parametrize("seed", range(30))
def test_observables_match_reference(seed):
    rng = np.random.default_rng(100 + seed)
    n, margin = int(rng.integers(2, 5)), int(rng.integers(1, 4))
    p = float(rng.choice([0.3, 0.45, 0.6]))
    frame = SimFrame.with_margin(2, n, margin)
    sampler = EdgeSampler(seed, p)
    f, inner = build(frame, sampler), build(frame.inner, sampler)
    N = frame.outer.n
    assert r_fb(frame, f) == ref.r_fb(n, N, 2, sampler.state)
    assert r_zb(frame, f, inner) == ref.r_zb(n, N, 2, sampler.state)
    assert s_n(frame, f, 1.5) == ref.s_n(n, N, 2, sampler.state, 1.5)
    assert r_zb(frame, f, inner) <= r_fb(frame, f)


def test_mask_and_callable_agree_with_sampler():
    box = BoxSpec(2, 5)
    sampler = EdgeSampler(3, 0.5)
    a = build(box, sampler)
    b = build(box, sampler.state)
    assert np.array_equal(a.parent, b.parent)
    mask = np.zeros((box.num_vertices, 2), dtype=bool)
    for e in interior_edges(box):
        mask[vertex_index(box, e.base), e.axis] = sampler.state(e)
    c = build(box, mask)
    assert np.array_equal(a.parent, c.parent)


def test_restricted_config_cuts_bonds_outside():
    sampler = EdgeSampler(7, 1.0)
    f = build(BoxSpec(2, 4), RestrictedConfig(sampler, BoxSpec(2, 2)))
    r = f.find((0, 0))
    assert f.extents(r) == [(-2, 2), (-2, 2)]
    assert f.find((3, 0)) != r


def test_one_arm_monotone_in_p():
    frame = SimFrame.with_margin(2, 4, 0)
    for seed in range(50):
        vals = [one_arm_indicator(frame, build(frame, EdgeSampler(seed, p)))
                for p in np.linspace(0, 1, 11)]
        assert vals == sorted(vals)


def test_max_diameter_monotone_in_world():
    box = BoxSpec(2, 6)
    for seed in range(20):
        vals = [r_world(box, build(box, EdgeSampler(seed, p))) for p in np.linspace(0, 1, 11)]
        assert vals == sorted(vals)
        assert vals[-1] == 12
