"""Rational primes and their behaviour in Z[w].

Primality is a deterministic Miller-Rabin test (the first twelve primes as
witnesses are enough for every 64-bit input); factorization is trial
division by the primes below 1000 followed by Pollard rho with Brent's
cycle detection.
"""
import logging
from dataclasses import dataclass
from math import gcd, isqrt
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from nicomachus.base.primitives import (
    DomainError,
    InvariantViolation,
    PrimeClass,
)
from nicomachus.eisenstein import EisensteinInt, positive_representative

logger = logging.getLogger(__name__)

INPUT_LIMIT = 2 ** 63
SPLIT_LIMIT = 2 ** 62
BRUTE_FORCE_LIMIT = 10 ** 10
MILLER_RABIN_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def small_primes(limit: int) -> Tuple[int, ...]:
    """All primes below limit (sieve of Eratosthenes)."""
    if limit <= 2:
        return ()
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for i in range(2, isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


SMALL_PRIMES = small_primes(1000)
SMALL_INERT_PRIMES = tuple(p for p in SMALL_PRIMES if p % 3 == 2)


@dataclass(frozen=True)
class FactorMap:
    """Prime factorization as ((prime, exponent), ...), primes increasing."""
    factors: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if any(q <= p for p, q in zip(primes, primes[1:])):
            raise InvariantViolation(
                f"primes not strictly increasing: {primes}")
        if any(e < 1 for _, e in self.factors):
            raise InvariantViolation(f"zero exponent in {self.factors}")

    @classmethod
    def from_counts(cls, counts: Dict[int, int]) -> "FactorMap":
        return cls(factors=tuple(sorted(counts.items())))

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def value(self) -> int:
        result = 1
        for p, e in self.factors:
            result *= p ** e
        return result

    def exponent(self, prime: int) -> int:
        return dict(self.factors).get(prime, 0)

    def split_primes(self) -> List[Tuple[int, int]]:
        return [(p, e) for p, e in self.factors if p % 3 == 1]

    def inert_primes(self) -> List[Tuple[int, int]]:
        return [(p, e) for p, e in self.factors if p % 3 == 2]

    def split_multiplicity(self) -> int:
        """Number of prime factors = 1 mod 3, counting multiplicity."""
        return sum(e for _, e in self.split_primes())

    def format(self) -> str:
        if not self.factors:
            return "1"
        return "·".join(
            str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors)


def _check_range(value: int) -> int:
    value = int(value)
    if not 1 <= value < INPUT_LIMIT:
        raise DomainError(f"{value} outside [1, 2^63)")
    return value


def _miller_rabin(value: int) -> bool:
    d, s = value - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in MILLER_RABIN_BASES:
        x = pow(base, d, value)
        if x == 1 or x == value - 1:
            continue
        for _ in range(s - 1):
            x = x * x % value
            if x == value - 1:
                break
        else:
            return False
    return True


def is_prime(value: int) -> bool:
    value = _check_range(value)
    if value < 2:
        return False
    for p in MILLER_RABIN_BASES:
        if value % p == 0:
            return value == p
    if value < 41 * 41:
        return True
    return _miller_rabin(value)


def _pollard_brent(value: int, c: int) -> int:
    """A divisor of the odd composite value; may return value itself."""
    y, r, q, g = 2, 1, 1, 1
    batch = 128
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % value
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (y * y + c) % value
                q = q * abs(x - y) % value
            g = gcd(q, value)
            k += batch
        r <<= 1
    if g == value:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % value
            g = gcd(abs(x - ys), value)
    return g


def _find_divisor(value: int) -> int:
    for c in range(1, 64):
        divisor = _pollard_brent(value=value, c=c)
        if 1 < divisor < value:
            return divisor
    raise InvariantViolation(f"Pollard rho found no divisor of {value}")


def _factor_large(value: int, counts: Dict[int, int]) -> None:
    """Factor a cofactor with no prime divisor below 1000."""
    stack = [value]
    while stack:
        current = stack.pop()
        if is_prime(current):
            counts[current] = counts.get(current, 0) + 1
            continue
        root = isqrt(current)
        if root * root == current:
            stack.extend([root, root])
            continue
        divisor = _find_divisor(value=current)
        stack.extend([divisor, current // divisor])


def factor(value: int,
           trial_primes: Optional[Sequence[int]] = None) -> FactorMap:
    """Prime factorization of 1 <= value < 2^63.

    `trial_primes`, when given, must hold every prime below 1000 that
    divides value, in increasing order; the others are not tried.
    """
    value = _check_range(value)
    counts: Dict[int, int] = {}
    remaining = value
    for p in SMALL_PRIMES if trial_primes is None else trial_primes:
        if p * p > remaining:
            break
        while remaining % p == 0:
            counts[p] = counts.get(p, 0) + 1
            remaining //= p
    else:
        if remaining > 1:
            _factor_large(value=remaining, counts=counts)
            remaining = 1
    if remaining > 1:
        counts[remaining] = counts.get(remaining, 0) + 1
    return FactorMap.from_counts(counts)


def classify_prime(p: int) -> PrimeClass:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 3:
        return PrimeClass.RAMIFIED
    if p % 3 == 1:
        return PrimeClass.SPLIT
    return PrimeClass.INERT


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a modulo the odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        raise DomainError(f"{a} is not a square modulo {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, root = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, root = i, b * b % p, t * b * b % p, root * b % p
    return root


def cube_root_of_unity(p: int) -> int:
    """r with r^2 + r + 1 = 0 (mod p), for a prime p = 1 mod 3."""
    s = sqrt_mod_prime(a=p - 3, p=p)
    return (s - 1) * pow(2, -1, p) % p


def _form(u: Tuple[int, int]) -> int:
    return u[0] * u[0] + u[0] * u[1] + u[1] * u[1]


def _bilinear2(u: Tuple[int, int], v: Tuple[int, int]) -> int:
    return 2 * u[0] * v[0] + u[0] * v[1] + u[1] * v[0] + 2 * u[1] * v[1]


def _reduce_lattice(p: int, r: int) -> Tuple[int, int]:
    """Shortest vector of {(a, b): a = r*b mod p} under a^2 + ab + b^2."""
    u, v = (p, 0), (r, 1)
    while True:
        if _form(u) > _form(v):
            u, v = v, u
        den = _bilinear2(u, u)
        mu = (2 * _bilinear2(u, v) + den) // (2 * den)
        if mu == 0:
            return u
        v = (v[0] - mu * u[0], v[1] - mu * u[1])


def _brute_force_split(p: int) -> Tuple[int, int]:
    for a in range(1, isqrt(p) + 1):
        disc = 4 * p - 3 * a * a
        root = isqrt(disc)
        if root * root == disc and (root - a) % 2 == 0 and root > a:
            return a, (root - a) // 2
    raise InvariantViolation(f"no representation of the split prime {p}")


def split_prime(p: int) -> EisensteinInt:
    """rho with norm(rho) = p, both coordinates positive and re <= om."""
    if not 1 < p < SPLIT_LIMIT or p % 3 != 1 or not is_prime(p):
        raise DomainError(f"{p} is not a prime = 1 mod 3 below 2^62")
    r = cube_root_of_unity(p=p)
    a, b = _reduce_lattice(p=p, r=r)
    if _form((a, b)) != p:
        logger.warning(f"lattice descent missed for {p}, brute forcing")
        if p >= BRUTE_FORCE_LIMIT:
            raise InvariantViolation(f"lattice descent failed for {p}")
        a, b = _brute_force_split(p=p)
    rep = positive_representative(z=EisensteinInt(re=a, om=b))
    low, high = sorted(rep.pair)
    return EisensteinInt(re=low, om=high)


def ramified_prime() -> EisensteinInt:
    """1 + w, the prime of norm 3."""
    return EisensteinInt(re=1, om=1)
