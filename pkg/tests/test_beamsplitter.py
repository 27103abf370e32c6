import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oamdistill import beamsplitter as bs
from oamdistill.gates import cnot_operator
from oamdistill.qudit import DomainError, ResourceLimitError


@pytest.mark.parametrize("l, i, out", [(0, 0, 0), (2, 1, 1), (2, 0, 2), (1, 2, 2)])
def test_route_qutrit_examples(l, i, out):
    assert bs.route(l, i, 3) == out


def test_counterexample_routes_to_itself():
    # T_3|0>_0 T_3|2>_1 T_3|1>_2 = |0>_0 |2>_1 |1>_2
    y = (0, 2, 1)
    assert bs.output_channels(y) == (0, 1, 2)
    assert bs.routed_values(y) == y


def test_occupation_predicates():
    y = (0, 2, 1)
    assert bs.all_occupied(y) and not bs.all_equal(y)
    assert bs.output_channels((1, 1, 1)) == (1, 0, 2)
    assert bs.all_occupied((1, 1, 1)) and bs.all_equal((1, 1, 1))
    assert bs.output_channels((0, 1)) == (0, 0)
    assert not bs.all_occupied((0, 1))


def test_qubit_four_mode_case_by_enumeration():
    complete = [y for y in itertools.product(range(2), repeat=2) if bs.all_occupied(y)]
    assert complete == [(0, 0), (1, 1)]


def test_routed_values_requires_full_occupation():
    with pytest.raises(DomainError):
        bs.routed_values((0, 1))


@pytest.mark.parametrize("d", range(2, 9))
def test_t_operator_is_cnot(d):
    t = bs.t_as_operator(d)
    assert np.array_equal(t.entries, cnot_operator(d).entries)
    assert t.is_unitary()


def test_t2_is_polarizing_beam_splitter():
    # V=0, H=1; value x channel basis: |V>_0 -> |V>_0, |V>_1 -> |V>_1, |H>_0 -> |H>_1, |H>_1 -> |H>_0
    pbs = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.array_equal(bs.t_as_operator(2).entries, pbs)


def brute_counts(d):
    occupied, equal, counter = 0, 0, []
    for y in itertools.product(range(d), repeat=d):
        chans = {(v - c) % d for c, v in enumerate(y)}
        occ = len(chans) == d
        eq = len(set(y)) == 1
        occupied += occ
        equal += eq
        if occ and not eq:
            counter.append(y)
    return occupied, equal, counter


@pytest.mark.parametrize("d", range(2, 6))
def test_enumerate_configs_matches_brute_force(d):
    got = bs.enumerate_configs(d)
    occ, eq, counter = brute_counts(d)
    assert (got.count_occupied, got.count_all_equal) == (occ, eq) == (math.factorial(d), d)
    assert got.counterexamples == counter


def test_enumerate_configs_examples():
    assert bs.enumerate_configs(2) == (2, 2, [])
    c3 = bs.enumerate_configs(3)
    assert (c3.count_occupied, c3.count_all_equal) == (6, 3)
    assert (0, 2, 1) in c3.counterexamples
    c4 = bs.enumerate_configs(4)
    assert (c4.count_occupied, c4.count_all_equal, len(c4.counterexamples)) == (24, 4, 20)


def test_enumerate_configs_guard():
    with pytest.raises(ResourceLimitError):
        bs.enumerate_configs(8)


@pytest.mark.parametrize("d", range(2, 8))
def test_equal_implies_occupied(d):
    for l in range(d):
        assert bs.all_occupied((l,) * d)


def test_postselect_qubit_uniform():
    terms = {y: 0.5 for y in itertools.product(range(2), repeat=2)}
    out = bs.postselect(bs.ModeSuperposition(terms, 2), bs.ALL_EQUAL)
    assert set(out.terms) == {(0, 0), (1, 1)}
    assert abs(out.weight - 0.5) < 1e-12
    assert abs(out.norm2 - 1) < 1e-12


def test_postselect_counterexample():
    s = bs.ModeSuperposition({(0, 2, 1): 1.0}, 3)
    naive = bs.postselect(s, bs.OCCUPATION_ONLY)
    assert naive.weight == 1 and set(naive.terms) == {(0, 2, 1)}
    emc = bs.postselect(s, bs.ALL_EQUAL)
    assert emc.weight == 0 and emc.terms == {}


def test_postselect_unknown_rule():
    with pytest.raises(DomainError):
        bs.postselect(bs.ModeSuperposition({(0, 0): 1.0}, 2), "colour")


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.sampled_from(bs.RULES))
def test_postselect_idempotent(d, seed, rule):
    rng = np.random.default_rng(seed)
    configs = list(itertools.product(range(d), repeat=d))
    amps = rng.normal(size=len(configs)) + 1j * rng.normal(size=len(configs))
    amps[rng.random(len(configs)) < 0.5] = 0
    s = bs.ModeSuperposition(dict(zip(configs, amps / max(np.linalg.norm(amps), 1e-300))), d, 0.8)
    once = bs.postselect(s, rule)
    twice = bs.postselect(once, rule)
    assert abs(once.weight - twice.weight) < 1e-12
    assert once.terms.keys() == twice.terms.keys()
    for y in once.terms:
        assert abs(once.terms[y] - twice.terms[y]) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6).flatmap(lambda d: st.lists(st.integers(0, d - 1), min_size=d, max_size=d)))
def test_routing_preserves_values(y):
    if bs.all_occupied(y):
        assert sorted(bs.routed_values(y)) == sorted(y)
        assert bs.all_equal(bs.routed_values(y)) == bs.all_equal(y)
