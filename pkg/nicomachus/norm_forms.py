"""Representations N = a^2 + ab + b^2.

Three independent views of the same set: the brute-force scans
(`enumerate_all`, `enumerate_positive`), the closed-form counts read off
the factorization of N, and the constructive enumeration through the
Eisenstein factorization of N (`generate_from_factorization`).
"""
import itertools
import logging
from math import isqrt, prod
from typing import FrozenSet, List, Set

import numpy as np

from nicomachus.base.primitives import DomainError, Representation
from nicomachus.eisenstein import (
    EisensteinInt,
    conj,
    mul,
    orbit,
    power,
    units,
)
from nicomachus.factorint import FactorMap, factor, ramified_prime, split_prime

logger = logging.getLogger(__name__)

FORM_LIMIT = 2 ** 62
ENUMERATE_ALL_LIMIT = 10 ** 9
# N = n^2 + n + 1 for n = 10^6
ENUMERATE_POSITIVE_LIMIT = 10 ** 12 + 10 ** 6 + 1

__all__ = [
    "Representation",
    "is_representable",
    "count_all_representations",
    "enumerate_all",
    "enumerate_positive",
    "count_positive",
    "generate_from_factorization",
    "orbits",
]


def _check_range(value: int, limit: int) -> int:
    value = int(value)
    if not 1 <= value <= limit:
        raise DomainError(f"{value} outside [1, {limit}]")
    return value


def _representable(factor_map: FactorMap) -> bool:
    return all(e % 2 == 0 for _, e in factor_map.inert_primes())


def _split_count(factor_map: FactorMap) -> int:
    return prod(e + 1 for _, e in factor_map.split_primes())


def _isqrt_array(values: np.ndarray) -> np.ndarray:
    """Exact floor square roots of a nonnegative int64 array."""
    root = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    root -= (root * root > values).astype(np.int64)
    root += ((root + 1) * (root + 1) <= values).astype(np.int64)
    return root


def _extremal_bound(value: int) -> int:
    """Smallest A with 3A^2 >= 4N, i.e. ceil(2 sqrt(N/3))."""
    bound = isqrt(4 * value // 3)
    while 3 * bound * bound < 4 * value:
        bound += 1
    return bound


def is_representable(value: int) -> bool:
    """True iff every prime = 2 mod 3 divides N to an even power."""
    value = _check_range(value=value, limit=FORM_LIMIT - 1)
    return _representable(factor_map=factor(value))


def count_all_representations(value: int) -> int:
    """6 * prod(n_i + 1) over split primes, or 0 if not representable."""
    value = _check_range(value=value, limit=FORM_LIMIT - 1)
    factor_map = factor(value)
    if not _representable(factor_map=factor_map):
        return 0
    return 6 * _split_count(factor_map=factor_map)


def enumerate_all(value: int) -> FrozenSet[Representation]:
    """Every integer pair (a, b) with a^2 + ab + b^2 = N."""
    value = _check_range(value=value, limit=ENUMERATE_ALL_LIMIT)
    bound = _extremal_bound(value=value)
    a = np.arange(-bound, bound + 1, dtype=np.int64)
    disc = 4 * value - 3 * a * a
    keep = disc >= 0
    a, disc = a[keep], disc[keep]
    root = _isqrt_array(values=disc)
    hit = (root * root == disc) & ((root - a) % 2 == 0)
    pairs: Set[Representation] = set()
    for a_i, r_i in zip(a[hit].tolist(), root[hit].tolist()):
        for b_i in ((r_i - a_i) // 2, (-r_i - a_i) // 2):
            pairs.add(Representation(a=a_i, b=b_i, N=value))
    return frozenset(pairs)


def enumerate_positive(value: int) -> List[Representation]:
    """Every pair with a, b > 0, sorted by a."""
    value = _check_range(value=value, limit=ENUMERATE_POSITIVE_LIMIT)
    a = np.arange(1, isqrt(value) + 1, dtype=np.int64)
    disc = 4 * value - 3 * a * a
    root = _isqrt_array(values=disc)
    hit = (root * root == disc) & (root > a) & ((root - a) % 2 == 0)
    return [
        Representation(a=a_i, b=(r_i - a_i) // 2, N=value)
        for a_i, r_i in zip(a[hit].tolist(), root[hit].tolist())
    ]


def count_positive(value: int) -> int:
    """prod(n_i + 1) over split primes; one positive pair per orbit."""
    value = _check_range(value=value, limit=FORM_LIMIT - 1)
    if isqrt(value) ** 2 == value:
        raise DomainError(
            f"{value} is a perfect square; orbits may hold no positive pair")
    factor_map = factor(value)
    if not _representable(factor_map=factor_map):
        return 0
    return _split_count(factor_map=factor_map)


def _split_choices(p: int, e: int) -> List[EisensteinInt]:
    """rho^i * conj(rho)^(e - i) for i = 0..e."""
    rho = split_prime(p)
    rho_bar = conj(z=rho)
    return [
        mul(z=power(z=rho, exponent=i), w=power(z=rho_bar, exponent=e - i))
        for i in range(e + 1)
    ]


def _fixed_part(factor_map: FactorMap) -> EisensteinInt:
    """(1 + w)^j times the rational square root of the inert part."""
    base = power(z=ramified_prime(), exponent=factor_map.exponent(3))
    for q, m in factor_map.inert_primes():
        base = mul(z=base, w=EisensteinInt(re=q ** (m // 2), om=0))
    return base


def generate_from_factorization(value: int) -> FrozenSet[Representation]:
    """All representations built from the prime factors of N in Z[w]."""
    value = _check_range(value=value, limit=FORM_LIMIT - 1)
    factor_map = factor(value)
    if not _representable(factor_map=factor_map):
        raise DomainError(f"{value} is not of the form a^2 + ab + b^2")
    base = _fixed_part(factor_map=factor_map)
    choices = [_split_choices(p=p, e=e) for p, e in factor_map.split_primes()]
    pairs: Set[Representation] = set()
    for combo in itertools.product(*choices):
        z = base
        for part in combo:
            z = mul(z=z, w=part)
        for unit in units():
            w = mul(z=unit, w=z)
            pairs.add(Representation(a=w.re, b=w.om, N=value))
    logger.debug(f"generated {len(pairs)} representations of {value}")
    return frozenset(pairs)


def orbits(value: int) -> List[FrozenSet[Representation]]:
    """enumerate_all(N) grouped into unit orbits, sorted for stability."""
    remaining = set(enumerate_all(value))
    groups: List[FrozenSet[Representation]] = []
    while remaining:
        start = min(remaining)
        members = frozenset(
            Representation(a=w.re, b=w.om, N=value)
            for w in orbit(z=EisensteinInt(re=start.a, om=start.b)))
        groups.append(members)
        remaining -= members
    return groups
