"""Range scans over n: the prime-divisor conjecture for n^2 + n + 1 and the
agreement of the characterization predicates.

A range is cut into fixed-size contiguous chunks (independent of the worker
count), the chunks are checked by a process pool and merged back in chunk
order, so the deterministic part of a report never depends on `workers`.
"""
import json
import logging
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console

from nicomachus.base.primitives import (
    Check,
    DomainError,
    InvariantViolation,
)
from nicomachus.cubic_identity import (
    SOLVE_LIMIT,
    CubicInstance,
    corollary_holds,
    has_nontrivial_t2,
    has_nontrivial_t3,
    has_nontrivial_t4,
    solve,
)
from nicomachus.factorint import SMALL_PRIMES, factor, is_prime

logger = logging.getLogger(__name__)
console = Console(stderr=True, color_system=None)

SCAN_LIMIT = 10 ** 8
DEFAULT_CHUNK_SIZE = 10_000
DEFAULT_PROGRESS_EVERY = 10 ** 6
MODES = ("conjecture", "equivalence")


@dataclass(frozen=True)
class Counterexample:
    n: int
    prime: Optional[int]
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "prime": self.prime, "reason": self.reason}


@dataclass(frozen=True)
class ChunkResult:
    lo: int
    hi: int
    checked: int
    counterexamples: Tuple[Counterexample, ...]
    seconds: float


@dataclass
class ScanReport:
    mode: str
    n_lo: int
    n_hi: int
    checked: int = 0
    counterexamples: List[Counterexample] = field(default_factory=list)
    chunk_size: int = DEFAULT_CHUNK_SIZE
    chunks: int = 0
    workers: int = 1
    elapsed: float = 0.0

    @property
    def completed(self) -> bool:
        return self.checked == self.n_hi - self.n_lo + 1

    @property
    def throughput(self) -> float:
        return self.checked / self.elapsed if self.elapsed > 0 else 0.0

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "mode": self.mode,
            "range": [self.n_lo, self.n_hi],
            "checked": self.checked,
            "completed": self.completed,
            "chunk_size": self.chunk_size,
            "chunks": self.chunks,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }
        if include_timing:
            payload["workers"] = self.workers
            payload["elapsed_sec"] = f"{self.elapsed:.3f}"
            payload["throughput_per_sec"] = f"{self.throughput:.1f}"
        return payload


class RangeCheck(Check):
    """Checks every n of a chunk; subclasses implement `check_values`."""

    def check_values(self, lo: int, hi: int) -> List[Counterexample]:
        raise NotImplementedError

    def execute(self, lo: int, hi: int) -> ChunkResult:
        start_time = time.perf_counter()
        found = self.check_values(lo=lo, hi=hi)
        seconds = time.perf_counter() - start_time
        return ChunkResult(
            lo=lo, hi=hi, checked=hi - lo + 1,
            counterexamples=tuple(found), seconds=seconds)


def small_prime_hits(lo: int, hi: int,
                     primes: Sequence[int] = SMALL_PRIMES
                     ) -> Dict[int, List[int]]:
    """n -> the given primes dividing n^2 + n + 1, for n in [lo, hi]."""
    n = np.arange(lo, hi + 1, dtype=np.int64)
    values = n * n + n + 1
    candidates = np.array(primes, dtype=np.int64)
    hits: Dict[int, List[int]] = {}
    for i, j in np.argwhere(values[:, None] % candidates[None, :] == 0):
        hits.setdefault(lo + int(i), []).append(int(candidates[j]))
    return hits


def verified_counterexample(n: int, prime: int) -> Counterexample:
    value = CubicInstance(n=n).N
    if not (is_prime(prime) and prime % 3 == 2 and value % prime == 0):
        raise InvariantViolation(
            f"({n}, {prime}) is not a prime = 2 mod 3 dividing {value}")
    return Counterexample(n=n, prime=prime, reason="prime = 2 mod 3")


class ConjectureCheck(RangeCheck):
    def __init__(self):
        super().__init__("conjecture")

    def check_values(self, lo: int, hi: int) -> List[Counterexample]:
        small = small_prime_hits(lo=lo, hi=hi)
        found = []
        for n in range(lo, hi + 1):
            divisors = small.get(n, [])
            inert = [q for q in divisors if q % 3 == 2]
            if inert:
                logger.warning(f"small inert divisors of N for n = {n}: "
                               f"{inert}")
            factor_map = factor(CubicInstance(n=n).N, trial_primes=divisors)
            found.extend(verified_counterexample(n=n, prime=p)
                         for p, _ in factor_map.inert_primes())
        return found


class EquivalenceCheck(RangeCheck):
    """t2 = t3 = t4 for every n, plus the solver up to `enum_cap`."""

    def __init__(self, enum_cap: int):
        super().__init__("equivalence")
        self.enum_cap = enum_cap

    def verdicts(self, n: int) -> Dict[str, bool]:
        verdicts = {
            "t2": has_nontrivial_t2(n=n),
            "t3": has_nontrivial_t3(n=n),
            "t4": has_nontrivial_t4(n=n),
        }
        if n <= self.enum_cap:
            verdicts["solver"] = bool(solve(n=n))
        return verdicts

    def check_values(self, lo: int, hi: int) -> List[Counterexample]:
        found = []
        for n in range(lo, hi + 1):
            verdicts = self.verdicts(n=n)
            if len(set(verdicts.values())) > 1:
                reason = " ".join(f"{k}={v}" for k, v in verdicts.items())
                found.append(Counterexample(n=n, prime=None, reason=reason))
            if not corollary_holds(n=n):
                found.append(Counterexample(
                    n=n, prime=None, reason="one split prime but N != p, 3p"))
        return found


def _run_chunk(job: Tuple[RangeCheck, int, int]) -> ChunkResult:
    check, lo, hi = job
    return check.run(lo, hi)


def chunk_bounds(n_lo: int, n_hi: int, chunk_size: int
                 ) -> List[Tuple[int, int]]:
    return [(lo, min(lo + chunk_size - 1, n_hi))
            for lo in range(n_lo, n_hi + 1, chunk_size)]


def _validate(n_lo: int, n_hi: int, workers: int, chunk_size: int) -> None:
    if not 1 <= n_lo <= n_hi < SCAN_LIMIT:
        raise DomainError(
            f"need 1 <= n_lo <= n_hi < {SCAN_LIMIT}, got [{n_lo}, {n_hi}]")
    if workers < 1 or chunk_size < 1:
        raise DomainError("workers and chunk_size must be positive")


def _results(check: RangeCheck, bounds: List[Tuple[int, int]],
             pool: Optional[Any]) -> Iterable[ChunkResult]:
    jobs = [(check, lo, hi) for lo, hi in bounds]
    if pool is None:
        return map(_run_chunk, jobs)
    return pool.imap(_run_chunk, jobs)


def _merge(report: ScanReport, results: Iterable[ChunkResult],
           progress_every: int) -> None:
    next_mark = progress_every
    for chunk in results:
        report.checked += chunk.checked
        report.chunks += 1
        report.counterexamples.extend(chunk.counterexamples)
        while progress_every and report.checked >= next_mark:
            console.log(
                f"{report.mode} scan: checked {report.checked} values, up to "
                f"n = {chunk.hi}, {len(report.counterexamples)} "
                "counterexamples so far")
            next_mark += progress_every


def run_scan(check: RangeCheck, n_lo: int, n_hi: int, workers: int = 1,
             chunk_size: int = DEFAULT_CHUNK_SIZE,
             progress_every: int = DEFAULT_PROGRESS_EVERY) -> ScanReport:
    _validate(n_lo=n_lo, n_hi=n_hi, workers=workers, chunk_size=chunk_size)
    bounds = chunk_bounds(n_lo=n_lo, n_hi=n_hi, chunk_size=chunk_size)
    report = ScanReport(
        mode=check.name, n_lo=n_lo, n_hi=n_hi, chunk_size=chunk_size,
        workers=workers)
    logger.info(f"{check.name} scan of [{n_lo}, {n_hi}] in {len(bounds)} "
                f"chunks on {workers} workers")
    start_time = time.perf_counter()
    if workers == 1:
        _merge(report=report, progress_every=progress_every,
               results=_results(check, bounds, pool=None))
    else:
        with Pool(processes=workers) as pool:
            _merge(report=report, progress_every=progress_every,
                   results=_results(check, bounds, pool=pool))
    report.elapsed = time.perf_counter() - start_time
    if not report.completed:
        raise InvariantViolation(
            f"checked {report.checked} values of [{n_lo}, {n_hi}]")
    return report


def scan_conjecture(n_lo: int, n_hi: int, workers: int = 1,
                    **options) -> ScanReport:
    return run_scan(check=ConjectureCheck(), n_lo=n_lo, n_hi=n_hi,
                    workers=workers, **options)


def scan_equivalence(n_lo: int, n_hi: int, enum_cap: int, workers: int = 1,
                     **options) -> ScanReport:
    if not 0 <= enum_cap <= SOLVE_LIMIT:
        raise DomainError(f"enum_cap must lie in [0, {SOLVE_LIMIT}]")
    return run_scan(check=EquivalenceCheck(enum_cap=enum_cap), n_lo=n_lo,
                    n_hi=n_hi, workers=workers, **options)


def save_report(report: ScanReport, output_folder: str,
                include_timing: bool = True) -> Path:
    """Store the report as JSON in output_folder (created if missing)."""
    folder = Path(output_folder)
    folder.mkdir(parents=True, exist_ok=True)
    path = folder / f"scan_{report.mode}_{report.n_lo}_{report.n_hi}.json"
    with path.open("w") as f:
        json.dump(report.to_dict(include_timing=include_timing), f, indent=4)
    return path
