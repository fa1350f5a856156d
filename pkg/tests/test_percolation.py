import numpy as np
import pytest
from scipy import stats

from percolab.lattice import BoxSpec, EdgeId, interior_edges
from percolab.percolation import (EdgeSampler, RestrictedConfig, edge_state, edge_uniform,
                                  restricted_state, trial_seed)


def _random_edges(rng, k, d=2, span=10 ** 6):
    return rng.integers(-span, span, size=(k, d)), rng.integers(0, d, size=k)


def test_uniform_is_deterministic():
    e = EdgeId((3, -7), 1)
    assert edge_uniform(EdgeSampler(42, 0.5), e) == edge_uniform(EdgeSampler(42, 0.5), e)


def test_uniform_does_not_depend_on_p():
    e = EdgeId((3, -7), 1)
    assert EdgeSampler(42, 0.1).uniform(e) == EdgeSampler(42, 0.9).uniform(e)


def test_seed_changes_some_value():
    edges = [EdgeId((i, -i), i % 2) for i in range(100)]
    a = [EdgeSampler(1, 0.5).uniform(e) for e in edges]
    b = [EdgeSampler(2, 0.5).uniform(e) for e in edges]
    assert a != b


def test_vectorised_matches_scalar():
    s = EdgeSampler(9, 0.5)
    rng = np.random.default_rng(0)
    bases, axes = _random_edges(rng, 50, d=3)
    u = s.uniforms(bases, axes)
    assert list(u) == [s.uniform(EdgeId(tuple(b), int(a))) for b, a in zip(bases, axes)]


def test_uniform_chi_square():
    rng = np.random.default_rng(1)
    bases, axes = _random_edges(rng, 10 ** 6)
    u = EdgeSampler(12345, 0.5).uniforms(bases, axes)
    assert u.min() >= 0.0 and u.max() < 1.0
    counts = np.bincount((u * 64).astype(int), minlength=64)
    assert stats.chisquare(counts).pvalue > 1e-4


def test_uniform_on_consecutive_edges_chi_square():
    # structured inputs (a contiguous block) must look uniform too
    box = BoxSpec(2, 300)
    edges = list(interior_edges(BoxSpec(2, 20)))
    u = EdgeSampler(5, 0.5).uniforms([e.base for e in edges], [e.axis for e in edges])
    counts = np.bincount((u * 16).astype(int), minlength=16)
    assert stats.chisquare(counts).pvalue > 1e-4
    assert box.num_edges > len(edges)


def test_open_fraction():
    rng = np.random.default_rng(2)
    bases, axes = _random_edges(rng, 10 ** 6)
    frac = (EdgeSampler(777, 0.3).uniforms(bases, axes) < 0.3).mean()
    assert abs(frac - 0.3) <= 0.0015


@pytest.mark.parametrize("p, expected", [(0.0, False), (1.0, True)])
def test_extreme_p(p, expected):
    s = EdgeSampler(3, p)
    assert all(edge_state(s, e) is expected for e in interior_edges(BoxSpec(2, 3)))


def test_monotone_in_p():
    edges = list(interior_edges(BoxSpec(2, 6)))
    grid = [i / 10 for i in range(11)]
    opened = [{e for e in edges if EdgeSampler(11, p).state(e)} for p in grid]
    for lo, hi in zip(opened, opened[1:]):
        assert lo <= hi


def test_restricted_state():
    s = EdgeSampler(4, 1.0)
    c = RestrictedConfig(s, BoxSpec(2, 2))
    assert restricted_state(c, EdgeId((1, 0), 0))
    assert not restricted_state(c, EdgeId((2, 0), 0))
    assert not restricted_state(c, EdgeId((0, -3), 1))
    big = list(interior_edges(BoxSpec(2, 4)))
    assert sum(restricted_state(c, e) for e in big) == 2 * 4 * 5


def test_restricted_agrees_with_sampler_inside():
    s = EdgeSampler(8, 0.4)
    c = RestrictedConfig(s, BoxSpec(2, 3))
    for e in interior_edges(BoxSpec(2, 3)):
        assert c.state(e) == s.state(e)


def test_trial_seeds_distinct():
    seeds = {trial_seed(1, n, t) for n in (1, 2) for t in range(1000)}
    assert len(seeds) == 2000


def test_p_out_of_range():
    with pytest.raises(ValueError):
        EdgeSampler(0, 1.5)
