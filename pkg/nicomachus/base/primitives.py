import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Tuple


# Signed 64-bit coefficients, 128-bit intermediates.
COEFF_LIMIT = 2 ** 63
WIDE_LIMIT = 2 ** 127


class NicomachusError(Exception):
    """Root of every error raised by the package."""


class ArithmeticRangeError(NicomachusError, OverflowError):
    """A value left the supported integer range."""


class DomainError(NicomachusError, ValueError):
    """An input violates the precondition of an operation."""


class NoNontrivialSolutionError(DomainError):
    """The hypotheses of the pigeonhole construction do not hold."""


class InvariantViolation(NicomachusError, AssertionError):
    """An invariant guaranteed by a proof failed. This is a finding."""


class ResourceLimitError(NicomachusError, MemoryError):
    """A configured memory guard would be exceeded."""


class PrimeClass(Enum):
    RAMIFIED = "ramified"
    SPLIT = "split"
    INERT = "inert"


class SolutionKind(Enum):
    TRIVIAL_XK = "trivial_x_eq_k"
    TRIVIAL_X2 = "trivial_x_eq_2"
    TRIVIAL_KN1 = "trivial_k_eq_n_minus_1"
    TRIVIAL_K0 = "trivial_k_eq_0"
    NONTRIVIAL = "nontrivial"


class Status(Enum):
    OK = "ok"
    COUNTEREXAMPLE = "counterexample"
    ERROR = "error"

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "counterexample": 1, "error": 2}[self.value]


def check_coeff(value: int, what: str = "coefficient") -> int:
    """Return value if it fits a signed 64-bit integer."""
    if not -COEFF_LIMIT <= value < COEFF_LIMIT:
        raise ArithmeticRangeError(
            f"{what} {value} outside the signed 64-bit range")
    return value


def check_wide(value: int, what: str = "intermediate") -> int:
    """Return value if it fits a signed 128-bit integer."""
    if not -WIDE_LIMIT <= value < WIDE_LIMIT:
        raise ArithmeticRangeError(
            f"{what} {value} outside the 128-bit range")
    return value


@dataclass(frozen=True, order=True)
class Representation:
    """An ordered pair (a, b) with a^2 + ab + b^2 = N."""
    a: int
    b: int
    N: int

    def __post_init__(self):
        if self.a * self.a + self.a * self.b + self.b * self.b != self.N:
            raise DomainError(
                f"({self.a}, {self.b}) does not represent {self.N}")

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.a, self.b)

    @property
    def is_positive(self) -> bool:
        return self.a > 0 and self.b > 0

    def swapped(self) -> "Representation":
        return Representation(a=self.b, b=self.a, N=self.N)


class Check:
    """A named, timed unit of work.

    Subclasses implement `execute`; `run_with_time` returns the result
    together with the wall-clock seconds it took.
    """

    def __init__(self, name: str):
        self.name = name

    def execute(self, *args, **kwargs) -> Any:
        raise NotImplementedError

    def run(self, *args, **kwargs) -> Any:
        return self.execute(*args, **kwargs)

    def run_with_time(self, *args, **kwargs) -> Tuple[Any, float]:
        start_time = time.perf_counter()
        result = self.run(*args, **kwargs)
        return result, time.perf_counter() - start_time

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"
