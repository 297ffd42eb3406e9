from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from distchaos import ContractError, ParameterError
from distchaos.density import (IndexSet, block_checkpoints, build_blocks, density_profile,
                               distribution_functions, partial_density)

members = st.sets(st.integers(1, 200), max_size=60)


def test_partial_density_examples():
    assert partial_density(IndexSet(((2, 4),)), 4) == Fraction(3, 4)
    assert partial_density(IndexSet(((1, 1000),)), 500) == 1
    assert partial_density(IndexSet(), 10) == 0


def test_intervals_merge():
    s = IndexSet(((5, 7), (1, 3), (4, 4), (10, 12)))
    assert s.intervals == ((1, 7), (10, 12))
    assert 11 in s and 8 not in s
    assert s.block_of(11) == 2 and s.block_of(9) is None


@settings(max_examples=80, deadline=None)
@given(members, st.integers(1, 250))
def test_density_matches_brute_force(ms, n):
    s = IndexSet.from_members(ms)
    assert partial_density(s, n) == Fraction(sum(1 for m in ms if m <= n), n)
    assert list(s) == sorted(ms)


@settings(max_examples=60, deadline=None)
@given(members, members, st.integers(1, 250))
def test_density_monotone_under_inclusion(a, b, n):
    small, big = IndexSet.from_members(a), IndexSet.from_members(a | b)
    d = partial_density(small, n)
    assert 0 <= d <= partial_density(big, n) <= 1
    assert small.issubset(big)


def test_block_sets():
    assert list(build_blocks([2])) == [2, 3, 4]
    s = build_blocks([2, 17])
    assert s.intervals == ((2, 4), (17, 289))
    assert partial_density(s, 289) >= Fraction(273, 289)
    assert partial_density(build_blocks([2, 5]), 25) >= Fraction(21, 25)
    with pytest.raises(ContractError):
        build_blocks([3, 9])


def test_block_densities_increase_towards_one():
    anchors = [2, 5, 26, 677]
    prof = density_profile(build_blocks(anchors), block_checkpoints(anchors))
    for a, d in zip(anchors, prof.densities):
        assert d >= Fraction(a * a - a + 1, a * a)
    assert list(prof.densities) == sorted(prof.densities)


def test_profile_of_evens_and_singleton():
    evens = IndexSet.from_members(range(2, 101, 2))
    prof = density_profile(evens, [10, 50, 100])
    assert prof.densities == (Fraction(1, 2),) * 3
    single = density_profile(IndexSet(((1, 1),)), [1, 2, 4, 8])
    assert single.densities == (1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
    assert single.upper == 1 and single.lower == Fraction(1, 8)
    with pytest.raises(ParameterError):
        density_profile(evens, [5, 5])


def test_distribution_functions():
    assert distribution_functions([0.0] * 20, 0.1, 20) == (1, 1)
    assert distribution_functions([1.0] * 20, 0.5, 20) == (0, 0)
    alt = [0.0, 1.0] * 50
    low, up = distribution_functions(alt, 0.5, 101 - 1)
    assert abs(low - Fraction(1, 2)) <= Fraction(1, 100)
    assert abs(up - Fraction(1, 2)) <= Fraction(1, 50)
    with pytest.raises(ParameterError):
        distribution_functions(alt, 0.0, 10)


def test_json_round_trip():
    s = build_blocks([2, 5])
    assert IndexSet.from_json(s.to_json()) == s
    with pytest.raises(ContractError):
        IndexSet.from_json({"kind": "other", "intervals": []})
