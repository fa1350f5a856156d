import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

import reference as ref
from percolab import oracle
from percolab.errors import EdgeBudgetExceeded, ResourceRefusal
from percolab.lattice import BoxSpec, interior_edges, linf_norm

B21 = BoxSpec(2, 1)
RATIONALS = ["0", "1/10", "3/10", "1/2", "2/3", "1"]


def test_frozen_world_diameter_law():
    dist = oracle.enumerate(B21, "1/2", oracle.R_ZB_WORLD)
    assert dist.support == [(0, Fraction(1, 4096)), (1, Fraction(137, 1024)),
                            (2, Fraction(3547, 4096))]


def test_frozen_origin_diameter_law():
    dist = oracle.enumerate(B21, "1/2", oracle.DIAM_ORIGIN)
    assert dist.support == [(0, Fraction(1, 16)), (1, Fraction(7, 32)), (2, Fraction(23, 32))]


def test_one_arm_examples():
    assert oracle.exact_one_arm(B21, "1/2") == Fraction(15, 16)
    assert oracle.exact_one_arm(B21, "3/10") == Fraction(7599, 10000)


@pytest.mark.parametrize("p", ["1/10", "1/4", "1/2", "3/4", "9/10"])
def test_one_arm_closed_form(p):
    q = Fraction(p)
    assert oracle.exact_one_arm(B21, p) == 1 - (1 - q) ** 4


@pytest.mark.parametrize("p", RATIONALS)
def test_line_closed_form(p):
    q = Fraction(p)
    dist = oracle.enumerate(BoxSpec(1, 1), p, oracle.R_ZB_WORLD)
    assert dist.prob(2) == q * q
    assert dist.prob(1) == 2 * q * (1 - q)
    assert dist.prob(0) == (1 - q) ** 2


def test_full_occupation_is_point_mass():
    dist = oracle.enumerate(B21, 1, oracle.R_ZB_WORLD)
    assert dist.support == [(2, Fraction(1))]


@pytest.mark.parametrize("obs", oracle.OBSERVABLES)
@pytest.mark.parametrize("p", RATIONALS)
def test_probabilities_sum_to_one(obs, p):
    dist = oracle.enumerate(B21, p, obs, rho=0.5)
    assert dist.total() == 1
    assert all(q > 0 for _, q in dist.support)


@pytest.mark.parametrize("p", ["1/5", "1/2", "4/5"])
def test_tail_telescopes_to_mean(p):
    dist = oracle.enumerate(B21, p, oracle.DIAM_ORIGIN)
    top = max(v for v, _ in dist.support)
    assert sum(dist.tail(t) for t in range(1, top + 1)) == dist.mean()


def test_chunk_invariance():
    box = BoxSpec(2, 1)
    one = oracle.count_table(box, oracle.R_ZB_WORLD)
    many = oracle.count_table(box, oracle.R_ZB_WORLD, chunks=7)
    assert np.array_equal(one, many)
    assert one.sum() == 2 ** box.num_edges


def test_counts_match_python_enumeration():
    edges = list(interior_edges(B21))
    table = oracle.count_table(B21, oracle.R_ZB_WORLD)
    brute = np.zeros_like(table)
    for bits in itertools.product((False, True), repeat=len(edges)):
        opened = {e for e, b in zip(edges, bits) if b}
        best = max(ref.diameter(c) for c, _ in ref.clusters(B21, opened.__contains__))
        brute[sum(bits), best] += 1
    assert np.array_equal(table, brute)


def test_s_count_matches_python_enumeration():
    box = BoxSpec(1, 3)
    edges = list(interior_edges(box))
    rho = 1.5  # threshold 1.5 log 3 = 1.65
    dist = oracle.enumerate(box, "1/3", oracle.S_COUNT, rho=rho)
    q = Fraction(1, 3)
    brute = {}
    for bits in itertools.product((False, True), repeat=len(edges)):
        opened = {e for e, b in zip(edges, bits) if b}
        k = sum(bits)
        val = sum(len(c) for c, _ in ref.clusters(box, opened.__contains__)
                  if ref.diameter(c) > rho * np.log(3))
        brute[val] = brute.get(val, 0) + q ** k * (1 - q) ** (len(edges) - k)
    assert dist.support == sorted(brute.items())


def test_budget_refusal():
    with pytest.raises(EdgeBudgetExceeded) as info:
        oracle.enumerate(BoxSpec(2, 2), "1/2", oracle.R_ZB_WORLD)
    assert isinstance(info.value, ResourceRefusal)
    assert info.value.required == 40


def test_largest_admissible_box_runs():
    box = BoxSpec(1, 12)
    assert box.num_edges == oracle.EDGE_BUDGET
    dist = oracle.enumerate(box, "1/2", oracle.ONE_ARM)
    # the origin reaches +-12 iff one of the two straight 12-bond arms is fully open
    a = Fraction(1, 2 ** 12)
    assert dist.prob(1) == 1 - (1 - a) ** 2


@pytest.mark.parametrize("bad", [0.5, True, "x", "3/2", -1])
def test_inexact_or_invalid_p_refused(bad):
    with pytest.raises((TypeError, ValueError)):
        oracle.as_rational(bad)


def test_json_round_trip():
    dist = oracle.enumerate(B21, "3/10", oracle.DIAM_ORIGIN)
    back = oracle.ExactDistribution.from_dict(json.loads(dist.to_json()))
    assert back.support == dist.support
    assert back.p == Fraction(3, 10)
    assert json.loads(dist.to_json())["support"][0]["probability"] == str(dist.support[0][1])


def test_zero_box():
    dist = oracle.enumerate(BoxSpec(2, 0), "1/2", oracle.ONE_ARM)
    assert dist.support == [(1, Fraction(1))]
    assert linf_norm((0, 0)) == 0
