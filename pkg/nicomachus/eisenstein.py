"""Exact arithmetic in the Eisenstein integers Z[w].

Elements are stored as a coefficient pair (re, om) meaning re + om*w, with
w^2 = w - 1 applied immediately, so equality is structural. Coefficients
are checked against the signed 64-bit range on construction and norms are
computed exactly and checked against 128 bits.
"""
import logging
from math import isqrt
from dataclasses import dataclass
from typing import List

from nicomachus.base.primitives import (
    DomainError,
    InvariantViolation,
    Representation,
    check_coeff,
    check_wide,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EisensteinInt:
    re: int
    om: int

    def __post_init__(self):
        check_coeff(self.re, what="re coefficient")
        check_coeff(self.om, what="om coefficient")

    def __mul__(self, other: "EisensteinInt") -> "EisensteinInt":
        return mul(z=self, w=other)

    def __neg__(self) -> "EisensteinInt":
        return EisensteinInt(re=-self.re, om=-self.om)

    def conj(self) -> "EisensteinInt":
        return conj(z=self)

    def norm(self) -> int:
        return norm(z=self)

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.om == 0

    def __str__(self) -> str:
        return f"({self.re},{self.om})"


ZERO = EisensteinInt(re=0, om=0)
ONE = EisensteinInt(re=1, om=0)
OMEGA = EisensteinInt(re=0, om=1)


def mul(z: EisensteinInt, w: EisensteinInt) -> EisensteinInt:
    """Product under w^2 = w - 1."""
    re = check_wide(z.re * w.re - z.om * w.om)
    om = check_wide(z.re * w.om + z.om * w.re + z.om * w.om)
    return EisensteinInt(re=re, om=om)


def conj(z: EisensteinInt) -> EisensteinInt:
    """Complex conjugate: a + b*conj(w) = (a + b) - b*w."""
    return EisensteinInt(re=z.re + z.om, om=-z.om)


def norm(z: EisensteinInt) -> int:
    return check_wide(z.re * z.re + z.re * z.om + z.om * z.om, what="norm")


def power(z: EisensteinInt, exponent: int) -> EisensteinInt:
    if exponent < 0:
        raise DomainError(f"negative exponent {exponent}")
    result = ONE
    base = z
    while exponent:
        if exponent & 1:
            result = mul(z=result, w=base)
        exponent >>= 1
        if exponent:
            base = mul(z=base, w=base)
    return result


def units() -> List[EisensteinInt]:
    """The six units +-1, +-w, +-w^2 (w^2 = -1 + w)."""
    return [
        EisensteinInt(re=1, om=0), EisensteinInt(re=-1, om=0),
        EisensteinInt(re=0, om=1), EisensteinInt(re=0, om=-1),
        EisensteinInt(re=-1, om=1), EisensteinInt(re=1, om=-1),
    ]


def orbit(z: EisensteinInt) -> List[EisensteinInt]:
    """[z, -z, wz, -wz, w^2 z, -w^2 z]."""
    if z.is_zero:
        raise DomainError("the orbit of 0 is not defined")
    a, b = z.re, z.om
    return [
        EisensteinInt(re=a, om=b),
        EisensteinInt(re=-a, om=-b),
        EisensteinInt(re=-b, om=a + b),
        EisensteinInt(re=b, om=-(a + b)),
        EisensteinInt(re=-(a + b), om=a),
        EisensteinInt(re=a + b, om=-a),
    ]


def is_associate(z: EisensteinInt, w: EisensteinInt) -> bool:
    return w in orbit(z=z)


def _is_perfect_square(value: int) -> bool:
    return value >= 0 and isqrt(value) ** 2 == value


def positive_representative(z: EisensteinInt) -> Representation:
    """The unique orbit member with both coordinates positive.

    Only defined when norm(z) is not a perfect square; there every orbit
    member has ab != 0 and a + b != 0.
    """
    value = norm(z=z)
    if _is_perfect_square(value):
        raise DomainError(
            f"norm {value} of {z} is a perfect square")
    positives = [u for u in orbit(z=z) if u.re > 0 and u.om > 0]
    if len(positives) != 1:
        raise InvariantViolation(
            f"orbit of {z} has {len(positives)} positive members")
    chosen = positives[0]
    logger.debug(f"positive representative of {z} is {chosen}")
    return Representation(a=chosen.re, b=chosen.om, N=value)
