"""Pigeonhole construction of a nontrivial representation of n^2 + n + 1.

For s | N and the pairs 1 <= c, d <= n + 1, the key
(cn - d mod s, dn - c mod N/s) takes at most N values while there are
(n + 1)^2 > N pairs, so two pairs collide. Their difference (a, b)
satisfies s | an - b and N/s | bn - a, and the identity

    (an - b)(bn - a) = ab(n^2 + n + 1) - n(a^2 + ab + b^2)

then forces N | a^2 + ab + b^2, hence a^2 + ab + b^2 = N.
"""
import logging
import os
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from nicomachus.base.primitives import (
    DomainError,
    InvariantViolation,
    NoNontrivialSolutionError,
    Representation,
    ResourceLimitError,
    check_wide,
)
from nicomachus.cubic_identity import CubicInstance, has_nontrivial_t4
from nicomachus.factorint import factor

logger = logging.getLogger(__name__)

DEFAULT_MAX_TABLE = int(os.environ.get("NICOMACHUS_MAX_TABLE", 5_000_000))
STRATEGIES = ("hash", "sorted")


@dataclass(frozen=True)
class PigeonholeParams:
    n: int
    N: int
    s: int
    t: int

    def __post_init__(self):
        if self.N != self.n * self.n + self.n + 1:
            raise InvariantViolation(f"N = {self.N} is not n^2 + n + 1")
        if self.s <= 1 or self.N % self.s != 0:
            raise DomainError(f"s = {self.s} is not a divisor > 1 of N")
        if self.t <= 1 or (self.N // self.s) % self.t != 0:
            raise DomainError(f"t = {self.t} is not a divisor > 1 of N/s")
        if gcd(self.s, 3) != 1 or gcd(self.t, 3) != 1:
            raise DomainError("s and t must be coprime to 3")

    @property
    def cofactor(self) -> int:
        return self.N // self.s


class ResidueKey(NamedTuple):
    u: int
    v: int


@dataclass(frozen=True)
class Collision:
    later: Tuple[int, int]
    earlier: Tuple[int, int]
    key: ResidueKey
    insertions: int


@dataclass
class PigeonholeTrace:
    params: PigeonholeParams
    collision: Collision
    representation: Representation
    checks: List[Tuple[str, bool]] = field(default_factory=list)


def identity_m2_check(a: int, b: int, n: int) -> bool:
    lhs = check_wide((a * n - b) * (b * n - a))
    value = n * n + n + 1
    rhs = check_wide(a * b * value - n * (a * a + a * b + b * b))
    return lhs == rhs


def _smallest_split_prime(value: int) -> Optional[int]:
    primes = [p for p, _ in factor(value).split_primes()]
    return primes[0] if primes else None


def choose_moduli(n: int, s: Optional[int] = None) -> PigeonholeParams:
    """s and t as the smallest primes = 1 mod 3 dividing N and N/s."""
    if not has_nontrivial_t4(n=n):
        raise NoNontrivialSolutionError(
            f"N = {CubicInstance(n=n).N} is a prime or three times a prime")
    value = CubicInstance(n=n).N
    if s is None:
        s = _smallest_split_prime(value=value)
    if s is None:
        raise NoNontrivialSolutionError(f"N = {value} has no prime = 1 mod 3")
    if s <= 1 or value % s != 0 or gcd(s, 3) != 1:
        raise DomainError(
            f"s = {s} must divide N = {value}, exceed 1 and be coprime to 3")
    t = _smallest_split_prime(value=value // s)
    if t is None:
        raise NoNontrivialSolutionError(
            f"N/s = {value // s} has no prime factor = 1 mod 3")
    return PigeonholeParams(n=n, N=value, s=s, t=t)


def _hash_collision(n: int, s: int, cofactor: int, max_table: int
                    ) -> Collision:
    table: Dict[int, int] = {}
    width = n + 2
    for c in range(1, n + 2):
        for d in range(1, n + 2):
            key = ((c * n - d) % s) * cofactor + (d * n - c) % cofactor
            stored = table.get(key)
            if stored is not None:
                return Collision(
                    later=(c, d), earlier=divmod(stored, width),
                    key=ResidueKey(*divmod(key, cofactor)),
                    insertions=len(table))
            if len(table) >= max_table:
                raise ResourceLimitError(
                    f"key table reached the cap of {max_table} entries")
            table[key] = c * width + d
    raise InvariantViolation(f"no collision among (n + 1)^2 pairs, n = {n}")


def _sorted_collision(n: int, s: int, cofactor: int, max_table: int
                      ) -> Collision:
    """First collision in row-major order, found by a stable sort."""
    total = (n + 1) ** 2
    if total > max_table:
        raise ResourceLimitError(
            f"{total} keys exceed the cap of {max_table} entries")
    c, d = np.divmod(np.arange(total, dtype=np.int64), n + 1)
    c, d = c + 1, d + 1
    keys = ((c * n - d) % s) * cofactor + (d * n - c) % cofactor
    order = np.argsort(keys, kind="stable")
    ranked = keys[order]
    repeat = ranked[1:] == ranked[:-1]
    starts = np.flatnonzero(repeat & ~np.concatenate(([False], repeat[:-1])))
    if starts.size == 0:
        raise InvariantViolation(
            f"no collision among (n + 1)^2 pairs, n = {n}")
    seconds = order[starts + 1]
    best = int(np.argmin(seconds))
    later, earlier = int(seconds[best]), int(order[starts[best]])
    return Collision(
        later=(int(c[later]), int(d[later])),
        earlier=(int(c[earlier]), int(d[earlier])),
        key=ResidueKey(*divmod(int(keys[later]), cofactor)),
        insertions=later)


def find_collision(n: int, s: int, max_table: int = DEFAULT_MAX_TABLE,
                   strategy: str = "hash") -> Collision:
    """First pair of (c, d) pairs with equal residue keys, row-major.

    The later pair is returned first, so its c is not smaller.
    """
    value = CubicInstance(n=n).N
    if not 1 < s < value or value % s != 0:
        raise DomainError(f"s = {s} is not a proper divisor of N = {value}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    if max_table < 1:
        raise DomainError(f"max_table = {max_table} must be positive")
    finder = _hash_collision if strategy == "hash" else _sorted_collision
    collision = finder(n=n, s=s, cofactor=value // s, max_table=max_table)
    logger.debug(f"n = {n}, s = {s}: {collision}")
    return collision


def _checks_for(params: PigeonholeParams, a: int, b: int
                ) -> List[Tuple[str, bool]]:
    n, value = params.n, params.N
    form = a * a + a * b + b * b
    return [
        ("a >= 0", a >= 0),
        ("s | an - b", (a * n - b) % params.s == 0),
        ("N/s | bn - a", (b * n - a) % params.cofactor == 0),
        ("N | a^2 + ab + b^2", form % value == 0),
        ("0 < a^2 + ab + b^2 < 3n^2", 0 < form < 3 * n * n),
        ("a^2 + ab + b^2 != 2N", form != 2 * value),
        ("a^2 + ab + b^2 = N", form == value),
        ("a, b > 0", a > 0 and b > 0),
        ("2 <= a <= n - 1", 2 <= a <= n - 1),
        ("2 <= b <= n - 1", 2 <= b <= n - 1),
    ]


def run_construction(n: int, s: Optional[int] = None,
                     max_table: int = DEFAULT_MAX_TABLE,
                     strategy: str = "hash") -> PigeonholeTrace:
    params = choose_moduli(n=n, s=s)
    collision = find_collision(
        n=n, s=params.s, max_table=max_table, strategy=strategy)
    a = collision.later[0] - collision.earlier[0]
    b = collision.later[1] - collision.earlier[1]
    checks = _checks_for(params=params, a=a, b=b)
    failed = [name for name, passed in checks if not passed]
    if failed:
        raise InvariantViolation(
            f"pigeonhole construction for n = {n} gave ({a}, {b}); "
            f"failed: {', '.join(failed)}")
    return PigeonholeTrace(
        params=params, collision=collision,
        representation=Representation(a=a, b=b, N=params.N),
        checks=checks)


def construct_solution(n: int, s: Optional[int] = None,
                       max_table: int = DEFAULT_MAX_TABLE,
                       strategy: str = "hash") -> Representation:
    return run_construction(
        n=n, s=s, max_table=max_table, strategy=strategy).representation
