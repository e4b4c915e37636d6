"""Prime counting, six ways, with exact operation counts.

The methods form a ladder: each one removes a visible inefficiency from the
previous, and the per-method operation counters (division attempts for the
trial-division family, eliminations plus survivor tests for the sieves) make
the improvement measurable rather than anecdotal.  All methods agree on
nprimes and last_prime for every n; they differ only in cost.

  count_m0  trial division, every divisor tried          ~n^2 divisions
  count_m1  stop at the first factor                     ~n^2/log n
  count_m2  stop at sqrt(c)                              ~n^1.5/log n
  count_m3  divide by stored primes only                 ~n^1.5/log^2 n
  count_m4  flat sieve of Eratosthenes                   ~n log log n, n bytes
  count_m5  segmented sieve                              ~n log log n, O(sqrt n) memory

Counts are exact and deterministic, so they double as cross-method oracles in
the test suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .cancel import POLL_INTERVAL_OPS, CancelToken, RunAborted
from .errors import MemoryCapError, ParameterError

# Refuse flat-sieve (and bootstrap) allocations beyond this unless the caller
# raises the cap explicitly.  2 GiB keeps a 10^9 run comfortable on a small
# machine while refusing runs that would swap.
DEFAULT_MEMORY_CAP = 2 ** 31

# Segment size that keeps the working set inside L2/L3 cache yet amortises
# per-segment overhead; callers can override through SieveConfig.
DEFAULT_SEGSIZE = 2 ** 23

M3_INITIAL_CAPACITY = 1024


@dataclass
class PrimesReport:
    """Result of one prime-counting run.

    mod_ops counts divisibility probes (the guard division in the sqrt bound
    is bookkeeping and excluded); sieve_ops counts eliminations plus survivor
    tests.  Exactly one of the two is nonzero for the pure methods; the
    parallel sieve also reports the per-segment remainder evaluations it
    spends recomputing starting points.  memory_bytes is the array storage
    the method needed (0 for the constant-space methods).
    """

    method_id: str
    n: int
    nprimes: int
    last_prime: Optional[int]
    mod_ops: int
    sieve_ops: int
    memory_bytes: int
    elapsed_seconds: float
    sqrt_nprimes: Optional[int] = None
    sqrt_last_prime: Optional[int] = None
    workers: Optional[int] = None

    @property
    def density(self) -> float:
        """Fraction of numbers below n that are prime (0.0 for n == 0)."""
        return self.nprimes / self.n if self.n > 0 else 0.0


@dataclass
class SieveConfig:
    """Parameters for the segmented sieve.

    segsize must be at least 1; sizes at or above sqrt(n) are the useful
    regime (one bootstrap prime table serves every segment) but smaller
    values are legal and produce identical counts, just more slowly.
    """

    n: int
    segsize: int = DEFAULT_SEGSIZE
    memory_cap: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"n must be >= 0, got {self.n}")
        if self.segsize < 1:
            raise ParameterError(f"segsize must be >= 1, got {self.segsize}")
        if self.memory_cap < 1:
            raise ParameterError(f"memory_cap must be >= 1, got {self.memory_cap}")


def _validate_n(n: int) -> None:
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")


def _trial_division_driver(
    method_id: str,
    kernel,
    n: int,
    cancel: Optional[CancelToken],
    ops_per_candidate: Callable[[int], int],
) -> PrimesReport:
    """Run an all-candidates kernel over [2, n) in cancellation-sized slabs."""
    _validate_n(n)
    t0 = time.perf_counter()
    nprimes = 0
    mod_ops = 0
    last = -1
    lo = 2
    while lo < n:
        # Slab small enough that one slab is ~POLL_INTERVAL_OPS operations.
        # Cost per candidate grows within the slab, so re-estimate at the
        # tentative end; otherwise the first slab of a run is wildly oversized.
        est = max(1, ops_per_candidate(lo))
        tentative = max(16, POLL_INTERVAL_OPS // est)
        est = max(1, ops_per_candidate(min(n - 1, lo + tentative)))
        span = max(16, POLL_INTERVAL_OPS // est)
        hi = min(n, lo + span)
        d_np, d_ops, d_last = kernel(lo, hi)
        nprimes += int(d_np)
        mod_ops += int(d_ops)
        if d_last >= 0:
            last = int(d_last)
        lo = hi
        if lo < n and cancel is not None and cancel.expired():
            raise RunAborted(
                f"{method_id} cancelled at candidate {lo:,} of {n:,}",
                elapsed_seconds=time.perf_counter() - t0,
            )
    return PrimesReport(
        method_id=method_id,
        n=n,
        nprimes=nprimes,
        last_prime=last if last >= 0 else None,
        mod_ops=mod_ops,
        sieve_ops=0,
        memory_bytes=0,
        elapsed_seconds=time.perf_counter() - t0,
    )


def count_m0(n: int, cancel: Optional[CancelToken] = None) -> PrimesReport:
    """Count primes below n by trial division with no early exit.

    Every candidate c is divided by every d in [2, c), regardless of earlier
    outcomes, so mod_ops is exactly (n-2)(n-3)/2 for n >= 3 — the closed form
    m0_mod_ops() — which makes this the calibration anchor of the ladder.
    """
    return _trial_division_driver("M0", K.m0_range, n, cancel, lambda c: c)


def count_m1(n: int, cancel: Optional[CancelToken] = None) -> PrimesReport:
    """Count primes below n by trial division stopping at the first factor."""
    return _trial_division_driver("M1", K.m1_range, n, cancel, lambda c: c)


def count_m2(n: int, cancel: Optional[CancelToken] = None) -> PrimesReport:
    """Count primes below n by trial division stopping at sqrt(c).

    The bound is evaluated as d <= c // d so no square is ever formed; the
    guard division is not counted in mod_ops.
    """
    return _trial_division_driver(
        "M2", K.m2_range, n, cancel, lambda c: math.isqrt(c) + 1
    )


def count_m3(n: int, cancel: Optional[CancelToken] = None) -> PrimesReport:
    """Count primes below n by dividing only by previously found primes.

    Primes are stored as they are found in a growable array (initial capacity
    1024, doubled when full), so the table never exceeds twice the space the
    primes themselves need.  memory_bytes reports the final capacity.
    """
    _validate_n(n)
    t0 = time.perf_counter()
    primes = np.empty(M3_INITIAL_CAPACITY, np.int64)
    count = 0
    mod_ops = 0
    last = -1
    lo = 2
    while lo < n:
        tentative = max(16, POLL_INTERVAL_OPS // (math.isqrt(lo) + 1))
        est = math.isqrt(min(n - 1, lo + tentative)) + 1
        span = max(16, POLL_INTERVAL_OPS // est)
        hi = min(n, lo + span)
        while True:
            count, d_ops, d_last, next_c, full = K.m3_range(primes, count, lo, hi)
            count = int(count)
            mod_ops += int(d_ops)
            if d_last >= 0:
                last = int(d_last)
            lo = int(next_c)
            if not full:
                break
            new_capacity = primes.shape[0] * 2
            try:
                grown = np.empty(new_capacity, np.int64)
            except MemoryError:
                raise MemoryCapError(
                    "M3 prime table", new_capacity * 8, new_capacity * 8
                ) from None
            grown[:count] = primes[:count]
            primes = grown
        if lo < n and cancel is not None and cancel.expired():
            raise RunAborted(
                f"M3 cancelled at candidate {lo:,} of {n:,}",
                elapsed_seconds=time.perf_counter() - t0,
            )
    return PrimesReport(
        method_id="M3",
        n=n,
        nprimes=count,
        last_prime=last if last >= 0 else None,
        mod_ops=mod_ops,
        sieve_ops=0,
        memory_bytes=primes.shape[0] * 8,
        elapsed_seconds=time.perf_counter() - t0,
    )


def count_m4(
    n: int,
    memory_cap: int = DEFAULT_MEMORY_CAP,
    cancel: Optional[CancelToken] = None,
) -> PrimesReport:
    """Count primes below n with a flat sieve of Eratosthenes.

    Allocates one byte per candidate (refused with MemoryCapError beyond
    memory_cap).  No divisions at all: sieve_ops counts composite
    eliminations plus the n-2 survivor tests.  Elimination for survivor v
    starts at v*v, and v*v is only formed after checking v <= (n-1)//v.
    """
    _validate_n(n)
    t0 = time.perf_counter()
    if n > memory_cap:
        raise MemoryCapError("M4 flat sieve", n, memory_cap)
    nprimes = 0
    sieve_ops = 0
    last = -1
    if n > 2:
        flags = np.ones(n, np.uint8)
        v_lo = 2
        while v_lo < n:
            v_hi = min(n, v_lo + POLL_INTERVAL_OPS)
            d_np, d_el, d_ts, d_last = K.m4_range(flags, n, v_lo, v_hi)
            nprimes += int(d_np)
            sieve_ops += int(d_el) + int(d_ts)
            if d_last >= 0:
                last = int(d_last)
            v_lo = v_hi
            if v_lo < n and cancel is not None and cancel.expired():
                raise RunAborted(
                    f"M4 cancelled at candidate {v_lo:,} of {n:,}",
                    elapsed_seconds=time.perf_counter() - t0,
                )
    return PrimesReport(
        method_id="M4",
        n=n,
        nprimes=nprimes,
        last_prime=last if last >= 0 else None,
        mod_ops=0,
        sieve_ops=sieve_ops,
        memory_bytes=n,
        elapsed_seconds=time.perf_counter() - t0,
    )


def bootstrap_primes(n: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> np.ndarray:
    """All primes <= isqrt(n), via a flat sieve run with limit isqrt(n)+1."""
    limit = math.isqrt(n) + 1 if n > 0 else 1
    if limit + 1 > memory_cap:
        raise MemoryCapError("segmented-sieve bootstrap", limit + 1, memory_cap)
    return K.sieve_primes_upto(limit - 1)


def _segment_tables(n: int, memory_cap: int):
    """Bootstrap table for the segmented sieves: odd primes <= sqrt(n).

    2 is deliberately left out — segments pre-clear even candidates with a
    fixed stride-2 pattern, so storing 2 (and walking half the segment again)
    would only duplicate that work.  Returns (odd_primes, sqrt_nprimes,
    sqrt_last_prime) where sqrt_last_prime still reflects the full table.
    """
    boot = bootstrap_primes(n, memory_cap)
    sqrt_last = int(boot[-1]) if boot.shape[0] else None
    odd = boot[1:].copy() if boot.shape[0] else boot
    return odd, int(odd.shape[0]), sqrt_last


def count_m5(
    config: SieveConfig,
    cancel: Optional[CancelToken] = None,
    progress: Optional[Callable[[int, int, int], None]] = None,
) -> PrimesReport:
    """Count primes below n with a segmented sieve.

    Memory never grows with n beyond the bootstrap: one segsize-byte buffer
    plus 16 bytes (value and next-multiple cursor) per odd prime <= sqrt(n).
    Produces identical counts for every legal segsize.  `progress`, if given,
    is called with (top, n, nprimes_so_far) after each segment.
    """
    n = config.n
    t0 = time.perf_counter()
    odd_primes, sqrt_np, sqrt_last = _segment_tables(n, config.memory_cap)
    segsize = config.segsize
    if segsize > config.memory_cap:
        raise MemoryCapError("M5 segment buffer", segsize, config.memory_cap)
    buf = np.empty(segsize, np.uint8)
    nxt = odd_primes * odd_primes  # first elimination for p starts at p*p
    nprimes = 0
    sieve_ops = 0
    last = -1
    bot = 0
    while bot < n:
        top = min(bot + segsize, n)
        d_np, d_el, d_ts, d_last = K.m5_segment(odd_primes, nxt, buf, bot, top)
        nprimes += int(d_np)
        sieve_ops += int(d_el) + int(d_ts)
        if d_last >= 0:
            last = int(d_last)
        bot = top
        if progress is not None:
            progress(top, n, nprimes)
        if bot < n and cancel is not None and cancel.expired():
            raise RunAborted(
                f"M5 cancelled at {bot:,} of {n:,}",
                elapsed_seconds=time.perf_counter() - t0,
            )
    return PrimesReport(
        method_id="M5",
        n=n,
        nprimes=nprimes,
        last_prime=last if last >= 0 else None,
        mod_ops=0,
        sieve_ops=sieve_ops,
        memory_bytes=segsize + 16 * int(odd_primes.shape[0]),
        elapsed_seconds=time.perf_counter() - t0,
        sqrt_nprimes=sqrt_np,
        sqrt_last_prime=sqrt_last,
    )


def m0_mod_ops(n: int) -> int:
    """Closed form for count_m0(n).mod_ops: (n-2)(n-3)/2 for n >= 3, else 0.

    Each candidate c in [2, n) costs exactly c-2 divisions, and the sum
    telescopes.  Exact, so huge-n cells can be tabulated without running M0.
    """
    if n < 3:
        return 0
    return (n - 2) * (n - 3) // 2


_WARMED = False


def warm_kernels() -> None:
    """Compile (or load from cache) every prime kernel so that timed runs do
    not include JIT latency.  Idempotent and cheap after the first call."""
    global _WARMED
    if _WARMED:
        return
    count_m0(64)
    count_m1(64)
    count_m2(64)
    count_m3(64)
    count_m4(64)
    count_m5(SieveConfig(n=64, segsize=16))
    _WARMED = True
