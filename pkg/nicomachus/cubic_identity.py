"""The modified cube-sum identity

    sum_{j<=n} j^3 + x^3 - k^3 = (sum_{j<=n} j + x - k)^2

and its reduction, through k = a - 1 and x = b + 1, to the norm form
a^2 + ab + b^2 = n^2 + n + 1 = N.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from nicomachus.base.primitives import (
    DomainError,
    Representation,
    SolutionKind,
    check_wide,
)
from nicomachus.factorint import factor, is_prime
from nicomachus.norm_forms import count_positive, enumerate_positive

logger = logging.getLogger(__name__)

SOLVE_LIMIT = 10 ** 6
PREDICATE_LIMIT = 2 ** 62


@dataclass(frozen=True)
class CubicInstance:
    n: int
    N: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n = {self.n} must be positive")
        object.__setattr__(self, "N", self.n * self.n + self.n + 1)


@dataclass(frozen=True)
class Solution:
    k: int
    x: int
    n: int
    kind: SolutionKind

    @classmethod
    def of(cls, k: int, x: int, n: int) -> "Solution":
        return cls(k=k, x=x, n=n, kind=classify(k=k, x=x, n=n))

    @property
    def triple(self) -> Tuple[int, int, int]:
        return (self.k, self.x, self.n)


def _check_n(n: int, limit: int) -> int:
    n = int(n)
    if n < 1:
        raise DomainError(f"n = {n} must be positive")
    if n * n + n + 1 >= limit:
        raise DomainError(f"N = n^2 + n + 1 exceeds {limit} for n = {n}")
    return n


def identity_sides(k: int, x: int, n: int) -> Tuple[int, int]:
    """Both sides of the cube-sum identity, evaluated exactly."""
    if n < 1:
        raise DomainError(f"n = {n} must be positive")
    linear = n * (n + 1) // 2
    lhs = check_wide(linear * linear + x ** 3 - k ** 3, what="left side")
    rhs = check_wide((linear + x - k) ** 2, what="right side")
    return lhs, rhs


def verify_identity(k: int, x: int, n: int) -> bool:
    lhs, rhs = identity_sides(k=k, x=x, n=n)
    return lhs == rhs


def reduced_form_check(k: int, x: int, n: int) -> bool:
    """x^2 + kx + k^2 = n(n + 1) + (x - k).

    This is the identity divided by x - k, so it fails on the x = k family.
    """
    if n < 1:
        raise DomainError(f"n = {n} must be positive")
    lhs = check_wide(x * x + k * x + k * k)
    return lhs == n * (n + 1) + (x - k)


def classify(k: int, x: int, n: int) -> SolutionKind:
    if not verify_identity(k=k, x=x, n=n):
        raise DomainError(f"({k}, {x}, {n}) does not satisfy the identity")
    if x == k:
        return SolutionKind.TRIVIAL_XK
    if x == 2:
        return SolutionKind.TRIVIAL_X2
    if k == n - 1:
        return SolutionKind.TRIVIAL_KN1
    if k == 0:
        return SolutionKind.TRIVIAL_K0
    return SolutionKind.NONTRIVIAL


def to_representation(solution: Solution) -> Representation:
    """(k + 1, x - 1); the x = k family generally has no image."""
    instance = CubicInstance(n=solution.n)
    return Representation(a=solution.k + 1, b=solution.x - 1, N=instance.N)


def from_representation(a: int, b: int, n: int) -> Solution:
    if a < 1 or b < 1:
        raise DomainError(f"({a}, {b}) is not a positive pair")
    return Solution.of(k=a - 1, x=b + 1, n=n)


def is_nontrivial_rep(a: int, b: int, n: int) -> bool:
    instance = CubicInstance(n=n)
    if a < 1 or b < 1 or a * a + a * b + b * b != instance.N:
        raise DomainError(
            f"({a}, {b}) is not a positive representation of {instance.N}")
    return a >= 2 and b >= 2 and a != n and a != b + 2


def solve(n: int) -> List[Solution]:
    """Every nontrivial positive solution for this n, sorted by k."""
    n = _check_n(n=n, limit=PREDICATE_LIMIT)
    if n > SOLVE_LIMIT:
        raise DomainError(f"n = {n} above the enumeration limit {SOLVE_LIMIT}")
    if n == 1:
        return []
    instance = CubicInstance(n=n)
    solutions = [
        from_representation(a=rep.a, b=rep.b, n=n)
        for rep in enumerate_positive(instance.N)
        if is_nontrivial_rep(a=rep.a, b=rep.b, n=n)
    ]
    logger.debug(f"n = {n}: {len(solutions)} nontrivial solutions")
    return sorted(solutions, key=lambda s: s.k)


def brute_force_solutions(n: int) -> List[Solution]:
    """Nontrivial solutions found by scanning (k, x) over the identity."""
    n = _check_n(n=n, limit=10 ** 8)
    found = []
    for k in range(0, n + 1):
        for x in range(1, n + 3):
            if not verify_identity(k=k, x=x, n=n):
                continue
            solution = Solution.of(k=k, x=x, n=n)
            if solution.kind is SolutionKind.NONTRIVIAL:
                found.append(solution)
    return found


def has_nontrivial_t2(n: int) -> bool:
    """At least two prime factors of N = 1 mod 3, counting multiplicity."""
    n = _check_n(n=n, limit=PREDICATE_LIMIT)
    return factor(CubicInstance(n=n).N).split_multiplicity() >= 2


def has_nontrivial_t3(n: int) -> bool:
    """A positive pair other than (n, 1) and (1, n) exists."""
    n = _check_n(n=n, limit=PREDICATE_LIMIT)
    return count_positive(CubicInstance(n=n).N) >= 3


def n_shape(n: int) -> str:
    """'prime', 'three_times_prime' or 'composite' for N."""
    n = _check_n(n=n, limit=PREDICATE_LIMIT)
    value = CubicInstance(n=n).N
    if is_prime(value):
        return "prime"
    if value % 3 == 0 and is_prime(value // 3):
        return "three_times_prime"
    return "composite"


def has_nontrivial_t4(n: int) -> bool:
    """N is neither a prime nor three times a prime."""
    return n_shape(n=n) == "composite"


def corollary_holds(n: int) -> bool:
    """One split prime factor (with multiplicity) forces N = p or N = 3p."""
    n = _check_n(n=n, limit=PREDICATE_LIMIT)
    if factor(CubicInstance(n=n).N).split_multiplicity() != 1:
        return True
    return n_shape(n=n) != "composite"


def construct_cubic_solution(n: int) -> Solution:
    """Nontrivial solution from the pigeonhole construction.

    The constructed pair can satisfy a = b + 2, which is trivial for the
    identity; its mirror (b, a) is then used.
    """
    from nicomachus.pigeonhole import construct_solution
    rep = construct_solution(n=n)
    if rep.a == rep.b + 2:
        rep = rep.swapped()
    return from_representation(a=rep.a, b=rep.b, n=n)
