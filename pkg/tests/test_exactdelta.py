import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qencost.errors import DomainError, TooLarge
from qencost.exactdelta import (
    band_count_range, delta_bruteforce, delta_exact, delta_exact_shots,
    enumerate_configs, extension_level, multinomial,
)


def by_count_vectors(n_tilde, N, eps):
    """Sum of multinomial(N; k) over all count vectors inside the band."""
    lo, hi = band_count_range(n_tilde, N, eps)
    good = 0
    for k in itertools.product(range(lo, hi + 1), repeat=n_tilde):
        if sum(k) == N:
            good += multinomial(N, k)
    return Fraction(good, n_tilde**N)


def test_anchor_two_outcomes_two_shots():
    assert delta_exact(2, 1, 0.1).value == Fraction(1, 2)
    assert delta_bruteforce(2, 2, 0.1) == Fraction(1, 2)


def test_extension_level_exact():
    assert extension_level(10, 0.3) == 3
    assert extension_level(3, 0.1) == 0
    assert extension_level(5, 0.6) == 3


def test_configs_for_small_case():
    cfgs = enumerate_configs(3, 2, 0.5)
    shapes = sorted(tuple(sorted(c.v.items())) for c in cfgs)
    assert shapes == [((-1, 1), (0, 1), (1, 1)), ((0, 3),)]


@pytest.mark.parametrize("nt", [2, 3, 4])
@pytest.mark.parametrize("eps", [0.1, 0.3, 0.6, 0.9])
def test_exact_against_count_vectors(nt, eps):
    for z in range(1, 12 // nt + 1):
        assert delta_exact(nt, z, eps).value == by_count_vectors(nt, nt * z, eps)


@pytest.mark.parametrize("nt,z", [(2, 2), (3, 2), (4, 1), (2, 5)])
def test_exact_against_bruteforce(nt, z):
    for eps in (0.1, 0.3, 0.6, 0.9):
        assert delta_exact(nt, z, eps).value == delta_bruteforce(nt, nt * z, eps)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.sampled_from([0, 0.05, 0.2, 0.5, 0.75, 1.0]))
def test_exact_is_probability(nt, z, eps):
    v = delta_exact(nt, z, eps).value
    assert 0 <= v <= 1


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 5))
def test_monotone_in_eps(nt, z):
    vals = [delta_exact(nt, z, e).value for e in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_eps_one_admits_everything_but_empty_extremes():
    # all counts in [0, 2z] are allowed for ntilde = 2
    assert delta_exact(2, 3, 1.0).value == 1


def test_single_outcome():
    assert delta_exact(1, 4, 0.1).value == 1


def test_shots_interface():
    assert delta_exact_shots(3, 6, 0.3) == delta_exact(3, 2, 0.3)
    with pytest.raises(DomainError):
        delta_exact_shots(3, 7, 0.3)


def test_result_dict_keys():
    d = delta_exact(3, 2, 0.6).as_dict()
    assert list(d) == ["n_tilde", "z", "epsilon", "j", "configs", "value_rational", "value_float"]
    num, den = map(int, d["value_rational"].split("/"))
    assert math.isclose(num / den, d["value_float"])


def test_brute_cap():
    with pytest.raises(TooLarge):
        delta_bruteforce(4, 12, 0.1)


def test_multinomial_checks():
    assert multinomial(4, [2, 1, 1]) == 12
    with pytest.raises(ValueError):
        multinomial(4, [2, 1])
