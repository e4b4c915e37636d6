"""Parallel segmented sieve: a worker pool over independent segments.

The sequential segmented sieve carries a next-multiple cursor from segment to
segment, which forces strict ordering.  Dropping that state makes every
segment independent: a worker recomputes each prime's starting point inside
its segment as max(p*p, first multiple of p >= bot) — one remainder per
(prime, segment), charged to mod_ops.  Segments are handed out through a
shared cursor under a lock, so fast workers simply take more segments; each
worker accumulates private totals and the totals are added together once at
join, which keeps every reported figure independent of scheduling order.

Workers are threads: the compiled segment kernel releases the GIL, so threads
scale on multicore machines while sharing the read-only prime table for free.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .cancel import CancelToken, RunAborted
from .errors import ParameterError
from .primes import (
    DEFAULT_MEMORY_CAP,
    DEFAULT_SEGSIZE,
    PrimesReport,
    SieveConfig,
    _segment_tables,
    count_m5,
)

logger = logging.getLogger(__name__)


@dataclass
class ParallelConfig:
    """Parameters for the parallel segmented sieve."""

    n: int
    segsize: int = DEFAULT_SEGSIZE
    workers: int = 1
    memory_cap: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"n must be >= 0, got {self.n}")
        if self.segsize < 1:
            raise ParameterError(f"segsize must be >= 1, got {self.segsize}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if self.memory_cap < 1:
            raise ParameterError(f"memory_cap must be >= 1, got {self.memory_cap}")


def first_multiple_in_segment(p: int, bot: int) -> int:
    """Starting point for prime p in the segment beginning at bot:
    max(p*p, smallest multiple of p that is >= bot).

    Mirrors the compiled kernel's arithmetic so the property can be tested
    against a brute-force scan.
    """
    start = bot + ((p - bot % p) % p)
    return max(p * p, start)


def count_parallel(
    config: ParallelConfig,
    cancel: Optional[CancelToken] = None,
    progress: Optional[Callable[[int, int, int], None]] = None,
    coverage_log: Optional[list] = None,
) -> PrimesReport:
    """Count primes below n with `workers` threads sieving independent
    segments.  All counters are exact and identical to count_m5's nprimes and
    last_prime for every worker count and segment size.

    `coverage_log`, if given, receives one (bot, top, nprimes) tuple per
    segment (test instrumentation for the tiling invariant).
    """
    n = config.n
    segsize = config.segsize
    t0 = time.perf_counter()
    # Bootstrap is sequential; the worker pool only starts once the shared
    # read-only prime table exists.
    odd_primes, sqrt_np, sqrt_last = _segment_tables(n, config.memory_cap)
    nseg = (n + segsize - 1) // segsize
    lock = threading.Lock()
    cursor = [0]
    aborted = [False]

    def worker():
        buf = np.empty(segsize, np.uint8)
        nprimes = 0
        elims = 0
        tests = 0
        mod_ops = 0
        last = -1
        while True:
            with lock:
                if aborted[0]:
                    break
                k = cursor[0]
                cursor[0] += 1
            if k >= nseg:
                break
            # Claimed a real segment; abort instead of processing it if the
            # token fired, so cancellation latency is one segment at most.
            if cancel is not None and cancel.expired():
                aborted[0] = True
                break
            bot = k * segsize
            top = min(bot + segsize, n)
            d_np, d_el, d_ts, d_last, d_mod = K.pseg_segment(
                odd_primes, buf, bot, top
            )
            nprimes += int(d_np)
            elims += int(d_el)
            tests += int(d_ts)
            mod_ops += int(d_mod)
            if d_last > last:
                last = int(d_last)
            if coverage_log is not None:
                with lock:
                    coverage_log.append((bot, top, int(d_np)))
            if progress is not None:
                with lock:
                    progress(top, n, nprimes)
        return nprimes, elims, tests, mod_ops, last

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(worker) for _ in range(config.workers)]
        results = [f.result() for f in futures]

    if aborted[0]:
        raise RunAborted(
            f"parallel sieve cancelled before {n:,}",
            elapsed_seconds=time.perf_counter() - t0,
        )
    nprimes = sum(r[0] for r in results)
    sieve_ops = sum(r[1] + r[2] for r in results)
    mod_ops = sum(r[3] for r in results)
    last = max(r[4] for r in results) if results else -1
    return PrimesReport(
        method_id="parallel",
        n=n,
        nprimes=nprimes,
        last_prime=last if last >= 0 else None,
        mod_ops=mod_ops,
        sieve_ops=sieve_ops,
        memory_bytes=segsize + 16 * int(odd_primes.shape[0]),
        elapsed_seconds=time.perf_counter() - t0,
        sqrt_nprimes=sqrt_np,
        sqrt_last_prime=sqrt_last,
        workers=config.workers,
    )


def speedup_curve(
    n: int,
    segsize: int = DEFAULT_SEGSIZE,
    worker_counts: tuple = (1, 2, 4, 8),
    repetitions: int = 3,
    csv_path: Optional[str] = None,
) -> list:
    """Measure the sequential sieve and the parallel sieve at each worker
    count; returns [(workers, best_elapsed_seconds, nprimes), ...] with
    workers=0 denoting the sequential baseline.

    Each configuration runs `repetitions` times and keeps the best time
    (scheduling noise only ever slows a run down).  The sequential baseline
    is expected to be at least as fast as one worker; a violation is logged
    but not fatal, since it usually just means a noisy machine.
    """
    if repetitions < 1:
        raise ParameterError(f"repetitions must be >= 1, got {repetitions}")
    rows = []
    best_seq = math.inf
    nprimes_seq = None
    for _ in range(repetitions):
        rep = count_m5(SieveConfig(n=n, segsize=segsize))
        best_seq = min(best_seq, rep.elapsed_seconds)
        nprimes_seq = rep.nprimes
    rows.append((0, best_seq, nprimes_seq))
    for w in worker_counts:
        best = math.inf
        nprimes = None
        for _ in range(repetitions):
            rep = count_parallel(ParallelConfig(n=n, segsize=segsize, workers=w))
            best = min(best, rep.elapsed_seconds)
            nprimes = rep.nprimes
        if nprimes != nprimes_seq:
            raise AssertionError(
                f"parallel sieve disagreed with sequential at workers={w}: "
                f"{nprimes} != {nprimes_seq}"
            )
        rows.append((w, best, nprimes))
    one_worker = next((r for r in rows if r[0] == 1), None)
    if one_worker is not None and best_seq > one_worker[1]:
        logger.warning(
            "sequential sieve (%.3fs) was slower than 1 worker (%.3fs); "
            "expected the stateful version to win",
            best_seq,
            one_worker[1],
        )
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("workers,elapsed_seconds,nprimes\n")
            for w, elapsed, np_ in rows:
                fh.write(f"{w},{elapsed!r},{np_}\n")
    return rows
