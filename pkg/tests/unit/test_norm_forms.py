from math import isqrt

import pytest

from nicomachus.base.primitives import DomainError, Representation
from nicomachus.eisenstein import EisensteinInt, orbit, units
from nicomachus.norm_forms import (
    count_all_representations,
    count_positive,
    enumerate_all,
    enumerate_positive,
    generate_from_factorization,
    is_representable,
    orbits,
)


def pairs(reps):
    return sorted(r.pair for r in reps)


def is_square(value: int) -> bool:
    return isqrt(value) ** 2 == value


@pytest.mark.parametrize("value, expected", [
    (2, False),
    (4, True),
    (91, True),
    (5 * 7, False),
    (25 * 7, True),
    (3, True),
])
def test_is_representable(value, expected):
    assert is_representable(value) is expected


@pytest.mark.parametrize("value, expected", [
    (3, 6),
    (7, 12),
    (91, 24),
    (2, 0),
    (1, 6),
    (49, 18),
])
def test_count_all_representations(value, expected):
    assert count_all_representations(value) == expected


def test_enumerate_all_small_cases():
    assert pairs(enumerate_all(1)) == sorted((u.re, u.om) for u in units())
    orbit_of_one_one = [(w.re, w.om) for w in orbit(z=EisensteinInt(1, 1))]
    assert pairs(enumerate_all(3)) == sorted(orbit_of_one_one)
    assert enumerate_all(2) == frozenset()


@pytest.mark.parametrize("value, expected", [
    (91, [(1, 9), (5, 6), (6, 5), (9, 1)]),
    (343, [(1, 18), (7, 14), (14, 7), (18, 1)]),
    (507, [(1, 22), (13, 13), (22, 1)]),
    (2, []),
])
def test_enumerate_positive_examples(value, expected):
    found = enumerate_positive(value)
    assert [r.pair for r in found] == expected
    assert all(isinstance(r, Representation) and r.N == value
               for r in found)


@pytest.mark.parametrize("value, expected", [
    (91, 4),
    (343, 4),
    (507, 3),
    (2, 0),
    (3, 1),
])
def test_count_positive_examples(value, expected):
    assert count_positive(value) == expected


def test_count_positive_refuses_squares():
    with pytest.raises(DomainError):
        count_positive(49)


def test_enumerate_positive_at_the_largest_solver_input():
    value = 10 ** 12 + 10 ** 6 + 1
    found = enumerate_positive(value)
    assert found[0].pair == (1, 10 ** 6)
    assert len(found) == count_positive(value)


@pytest.mark.parametrize("call, value", [
    (enumerate_all, 0),
    (enumerate_all, 10 ** 9 + 1),
    (enumerate_positive, 10 ** 13),
    (count_all_representations, 0),
    (is_representable, 2 ** 62),
])
def test_range_checks(call, value):
    with pytest.raises(DomainError):
        call(value)


@pytest.mark.parametrize("value, size", [(3, 6), (49, 18), (91, 24)])
def test_generate_from_factorization_examples(value, size):
    generated = generate_from_factorization(value)
    assert len(generated) == size
    assert generated == enumerate_all(value)


def test_generate_from_factorization_includes_rational_points():
    generated = {r.pair for r in generate_from_factorization(49)}
    assert (7, 0) in generated
    assert (3, 5) in generated


def test_generate_from_factorization_refuses_non_representable():
    with pytest.raises(DomainError):
        generate_from_factorization(2)


def test_enumeration_is_symmetric():
    for value in range(1, 3000):
        found = {r.pair for r in enumerate_all(value)}
        assert found == {(b, a) for a, b in found}


def test_orbits_partition_small_case():
    groups = orbits(91)
    assert len(groups) == 4
    assert all(len(group) == 6 for group in groups)
    assert frozenset().union(*groups) == enumerate_all(91)


@pytest.mark.slow
def test_formula_matches_enumeration_up_to_20000():
    for value in range(1, 20001):
        found = enumerate_all(value)
        assert count_all_representations(value) == len(found), value
        if not is_square(value):
            assert count_positive(value) == len(enumerate_positive(value))


@pytest.mark.slow
def test_each_orbit_holds_one_positive_pair_up_to_20000():
    for value in range(1, 20001):
        if is_square(value) or not is_representable(value):
            continue
        groups = orbits(value)
        assert sum(len(g) for g in groups) == len(enumerate_all(value))
        for group in groups:
            assert len(group) == 6
            assert sum(1 for r in group if r.is_positive) == 1, value


@pytest.mark.slow
def test_generation_matches_enumeration_up_to_5000():
    for value in range(1, 5001):
        if not is_representable(value):
            continue
        assert generate_from_factorization(value) == enumerate_all(value), \
            value
