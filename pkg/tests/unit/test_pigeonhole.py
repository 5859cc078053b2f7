import random

import pytest

from nicomachus.base.primitives import (
    DomainError,
    NoNontrivialSolutionError,
    ResourceLimitError,
)
from nicomachus.cubic_identity import CubicInstance, has_nontrivial_t4
from nicomachus.norm_forms import enumerate_positive
from nicomachus.pigeonhole import (
    PigeonholeParams,
    choose_moduli,
    construct_solution,
    find_collision,
    identity_m2_check,
    run_construction,
)


def constructible(limit: int):
    return [n for n in range(2, limit + 1) if has_nontrivial_t4(n=n)]


@pytest.mark.parametrize("a, b, n", [(0, 0, 5), (5, 6, 9), (-3, 7, 1)])
def test_identity_m2_examples(a, b, n):
    assert identity_m2_check(a=a, b=b, n=n)


def test_identity_m2_randomized():
    rng = random.Random(42)
    for _ in range(10 ** 5):
        a = rng.randint(-10 ** 6, 10 ** 6)
        b = rng.randint(-10 ** 6, 10 ** 6)
        n = rng.randint(1, 10 ** 6)
        assert identity_m2_check(a=a, b=b, n=n)


@pytest.mark.parametrize("n, s, t", [(9, 7, 13), (18, 7, 7), (22, 13, 13)])
def test_choose_moduli(n, s, t):
    params = choose_moduli(n=n)
    assert (params.s, params.t) == (s, t)
    assert params.N == CubicInstance(n=n).N
    assert params.cofactor == params.N // s


@pytest.mark.parametrize("n", [8, 10, 2])
def test_choose_moduli_without_hypotheses(n):
    with pytest.raises(NoNontrivialSolutionError):
        choose_moduli(n=n)


def test_choose_moduli_override():
    assert choose_moduli(n=9, s=13).t == 7
    with pytest.raises(DomainError):
        choose_moduli(n=9, s=5)
    with pytest.raises(DomainError):
        choose_moduli(n=22, s=39)
    # N/s = 3 holds no prime = 1 mod 3
    with pytest.raises(NoNontrivialSolutionError):
        choose_moduli(n=22, s=169)


def test_params_invariants():
    with pytest.raises(DomainError):
        PigeonholeParams(n=9, N=91, s=3, t=13)
    with pytest.raises(DomainError):
        PigeonholeParams(n=9, N=91, s=7, t=7)


@pytest.mark.parametrize("n, allowed", [
    (9, {(5, 6), (6, 5)}),
    (22, {(13, 13)}),
    (18, {(7, 14), (14, 7)}),
])
def test_construct_solution_golden(n, allowed):
    assert construct_solution(n=n).pair in allowed
    assert construct_solution(n=n, strategy="sorted").pair in allowed


def test_construct_solution_without_hypotheses():
    with pytest.raises(NoNontrivialSolutionError):
        construct_solution(n=8)


def test_collision_keys_and_ordering():
    for n in constructible(60):
        params = choose_moduli(n=n)
        collision = find_collision(n=n, s=params.s)
        assert collision.later != collision.earlier
        assert collision.later[0] >= collision.earlier[0]
        assert 0 <= collision.key.u < params.s
        assert 0 <= collision.key.v < params.cofactor
        assert collision.insertions <= (n + 1) ** 2
        for c, d in (collision.later, collision.earlier):
            assert 1 <= c <= n + 1 and 1 <= d <= n + 1
            assert ((c * n - d) % params.s,
                    (d * n - c) % params.cofactor) == tuple(collision.key)


def test_strategies_find_the_same_collision():
    for n in constructible(120):
        s = choose_moduli(n=n).s
        assert find_collision(n=n, s=s, strategy="hash") == \
            find_collision(n=n, s=s, strategy="sorted"), n


def test_find_collision_validation():
    with pytest.raises(DomainError):
        find_collision(n=9, s=5)
    with pytest.raises(DomainError):
        find_collision(n=9, s=91)
    with pytest.raises(DomainError):
        find_collision(n=9, s=7, strategy="bisect")
    with pytest.raises(DomainError):
        find_collision(n=9, s=7, max_table=0)


@pytest.mark.parametrize("strategy", ["hash", "sorted"])
def test_memory_guard(strategy):
    with pytest.raises(ResourceLimitError):
        find_collision(n=100, s=choose_moduli(n=100).s, max_table=50,
                       strategy=strategy)


def test_sorted_finder_refuses_past_the_default_cap():
    # (n + 1)^2 keys exceed 5 000 000 from n = 2236 on
    n = next(n for n in range(2236, 2400) if has_nontrivial_t4(n=n))
    with pytest.raises(ResourceLimitError):
        find_collision(n=n, s=choose_moduli(n=n).s, max_table=5_000_000,
                       strategy="sorted")


@pytest.mark.slow
def test_hash_finder_reaches_n_3000_under_the_default_cap():
    trace = run_construction(n=3000, max_table=5_000_000)
    assert trace.collision.insertions < 5_000_000
    assert all(passed for _, passed in trace.checks)


def test_trace_echoes_every_check():
    trace = run_construction(n=22)
    assert trace.params.s == 13
    assert trace.representation.pair == (13, 13)
    assert len(trace.checks) == 10
    assert all(passed for _, passed in trace.checks)


@pytest.mark.slow
def test_construction_up_to_1000():
    for n in constructible(1000):
        trace = run_construction(n=n, strategy="sorted")
        a, b = trace.representation.pair
        value = trace.params.N
        positives = {r.pair for r in enumerate_positive(value)}
        assert (a, b) in positives - {(n, 1), (1, n)}, n
        assert 2 <= a <= n - 1 and 2 <= b <= n - 1, n
        assert (a * n - b) % trace.params.s == 0
        assert (b * n - a) % trace.params.cofactor == 0
