"""Counting repeated length-m substrings, four ways, with exact counts.

A position i (1-based counting over the n-m+1 starting offsets, reported as
the count of offsets) is an m-repeat if the m characters starting there also
occur starting at some earlier offset.  The ladder:

  count_r0  all pairs, all m characters compared, no exits   ~m n^2 / 2
  count_r1  mismatch ends the pair, first match ends the row ~n^2 expected
  count_r2  sort a suffix index (mergesort), scan neighbors  ~n log n
  count_r3  depth-tracking ternary quicksort on the index    ~n(log n + m)

Texts are raw bytes; comparisons never look past offset+m-1, so the index
over the n-m+1 valid offsets needs no sentinel.  char_cmps counts individual
character comparisons and is exact (R3's count depends on its recorded pivot
seed).
"""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .cancel import POLL_INTERVAL_OPS, CancelToken, RunAborted
from .errors import ParameterError


@dataclass
class Text:
    """A text to scan: raw bytes plus a provenance label for transcripts."""

    data: bytes
    source: Optional[str] = None

    @property
    def n(self) -> int:
        return len(self.data)

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8)

    @classmethod
    def from_str(cls, s: str, source: Optional[str] = None) -> "Text":
        return cls(s.encode("utf-8"), source=source)


@dataclass
class RepeatsReport:
    """Result of one repeat-counting run.

    nrepeats counts starting offsets whose m-substring already occurred
    earlier; char_cmps counts single-character comparisons; memory_bytes is
    the suffix-index storage (8 bytes per indexed offset; 0 for the
    index-free methods).  pivot_seed is recorded for R3 so any run can be
    reproduced exactly.
    """

    method_id: str
    n: int
    m: int
    nrepeats: int
    char_cmps: int
    memory_bytes: int
    elapsed_seconds: float
    source: Optional[str] = None
    pivot_seed: Optional[int] = None


@dataclass
class SuffixIndex:
    """Offsets 0..n-m into a text, sorted by the first m characters of the
    suffix starting at each offset (stable: ties stay in offset order)."""

    entries: np.ndarray
    m: int


def generate_text(
    kind: str,
    n: int,
    alphabet_size: int = 256,
    seed: int = 0,
    period: int = 3,
) -> Text:
    """Deterministic corpus generator.

    kinds: "random" (iid bytes in [0, alphabet_size)), "all-equal" (one
    repeated letter, the adversarial case for the pair scanners), "periodic"
    (cyclic pattern of `period` distinct bytes).
    """
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if kind == "random":
        if not 1 <= alphabet_size <= 256:
            raise ParameterError(
                f"alphabet_size must be in [1, 256], got {alphabet_size}"
            )
        rng = np.random.default_rng(seed)
        data = rng.integers(0, alphabet_size, size=n, dtype=np.uint8).tobytes()
        return Text(data, source=f"random(alphabet={alphabet_size},seed={seed})")
    if kind == "all-equal":
        return Text(b"a" * n, source="all-equal")
    if kind == "periodic":
        if period < 1:
            raise ParameterError(f"period must be >= 1, got {period}")
        pattern = bytes((97 + i) % 256 for i in range(period))
        reps = n // period + 1
        return Text((pattern * reps)[:n], source=f"periodic(period={period})")
    raise ParameterError(f"unknown text kind {kind!r}")


def read_text(path: str, max_bytes: Optional[int] = None) -> Text:
    """Load a corpus file as raw bytes, optionally truncated to a prefix."""
    if max_bytes is not None and max_bytes < 0:
        raise ParameterError(f"max_bytes must be >= 0, got {max_bytes}")
    with open(path, "rb") as fh:
        data = fh.read() if max_bytes is None else fh.read(max_bytes)
    return Text(data, source=os.path.basename(path))


def _validate(text: Text, m: int) -> int:
    if m < 1 or m > text.n:
        raise ParameterError(
            f"m must be in [1, n]; got m={m} for a text of {text.n} bytes"
        )
    return text.n - m + 1  # number of starting offsets


def _pair_scan_driver(method_id, kernel, text, m, cancel, est_ops_per_row):
    size = _validate(text, m)
    t0 = time.perf_counter()
    arr = text.as_array()
    nrep = 0
    cmps = 0
    i_lo = 1
    while i_lo < size:
        # Row cost grows with i; re-estimate at the tentative slab end so the
        # first slab is not oversized (see the primes driver).
        tentative = max(1, POLL_INTERVAL_OPS // max(1, est_ops_per_row(i_lo)))
        est = max(1, est_ops_per_row(min(size - 1, i_lo + tentative)))
        span = max(1, POLL_INTERVAL_OPS // est)
        i_hi = min(size, i_lo + span)
        d_rep, d_cmp = kernel(arr, m, i_lo, i_hi)
        nrep += int(d_rep)
        cmps += int(d_cmp)
        i_lo = i_hi
        if i_lo < size and cancel is not None and cancel.expired():
            raise RunAborted(
                f"{method_id} cancelled at offset {i_lo:,} of {size:,}",
                elapsed_seconds=time.perf_counter() - t0,
            )
    return RepeatsReport(
        method_id=method_id,
        n=text.n,
        m=m,
        nrepeats=nrep,
        char_cmps=cmps,
        memory_bytes=0,
        elapsed_seconds=time.perf_counter() - t0,
        source=text.source,
    )


def count_r0(text: Text, m: int, cancel: Optional[CancelToken] = None) -> RepeatsReport:
    """Count m-repeats comparing every offset pair over all m characters,
    with no early exits anywhere.

    char_cmps is exactly m * k(k+1)/2 where k = n - m: every one of the
    k(k+1)/2 ordered pairs costs the full m comparisons.
    """
    return _pair_scan_driver("R0", K.r0_range, text, m, cancel, lambda i: i * m)


def count_r1(text: Text, m: int, cancel: Optional[CancelToken] = None) -> RepeatsReport:
    """Count m-repeats comparing offset pairs with both early exits: stop a
    pair at its first mismatching character, stop a row at its first match.

    On random text a pair costs about 1 + 1/alphabet_size comparisons on
    average, yet the pair count itself still grows quadratically.
    """
    return _pair_scan_driver("R1", K.r1_range, text, m, cancel, lambda i: i)


def _sorted_index(arr: np.ndarray, size: int, m: int, cancel, t0) -> tuple:
    """Bottom-up mergesort of the offset index by m-limited suffix order.
    Returns (index, char_cmps).  Cancellation is polled between passes."""
    index = np.arange(size, dtype=np.int64)
    if size < 2:
        return index, 0
    scratch = np.empty_like(index)
    cmps = 0
    width = 1
    src, dst = index, scratch
    while width < size:
        cmps += int(K.msort_pass(src, dst, arr, m, width))
        src, dst = dst, src
        width *= 2
        if width < size and cancel is not None and cancel.expired():
            raise RunAborted(
                f"suffix sort cancelled at pass width {width:,}",
                elapsed_seconds=time.perf_counter() - t0,
            )
    if src is not index:
        index[:] = src
    return index, cmps


def build_suffix_index(
    text: Text, m: int, cancel: Optional[CancelToken] = None
) -> SuffixIndex:
    """Sort the n-m+1 starting offsets by their length-m substrings."""
    size = _validate(text, m)
    index, _ = _sorted_index(text.as_array(), size, m, cancel, time.perf_counter())
    return SuffixIndex(entries=index, m=m)


def count_r2(text: Text, m: int, cancel: Optional[CancelToken] = None) -> RepeatsReport:
    """Count m-repeats by sorting a suffix index and scanning neighbors.

    After the stable m-limited mergesort, equal substrings are adjacent, so
    every entry whose m-prefix equals its predecessor's is a repeat.
    char_cmps covers both the sort and the scan; memory_bytes is the 8-byte
    index entry per offset (sorting scratch is transient and excluded).
    """
    size = _validate(text, m)
    t0 = time.perf_counter()
    arr = text.as_array()
    index, cmps = _sorted_index(arr, size, m, cancel, t0)
    d_rep, d_cmp = K.scan_adjacent(index, arr, m)
    return RepeatsReport(
        method_id="R2",
        n=text.n,
        m=m,
        nrepeats=int(d_rep),
        char_cmps=cmps + int(d_cmp),
        memory_bytes=8 * size,
        elapsed_seconds=time.perf_counter() - t0,
        source=text.source,
    )


def count_r3(
    text: Text,
    m: int,
    seed: Optional[int] = None,
    cancel: Optional[CancelToken] = None,
) -> RepeatsReport:
    """Count m-repeats with a depth-tracking ternary quicksort of the index.

    Ranges are partitioned three ways on the character at the current depth;
    the middle (equal) zone descends one character deeper, and any range that
    reaches depth m holds suffixes identical over all m characters, i.e.
    size-1 repeats — so counting falls out of the sort.  Pivots are sampled
    from a seeded generator so adversarial texts cannot force quadratic
    behaviour twice; the seed is drawn fresh per run unless given, and is
    recorded in the report either way.
    """
    size = _validate(text, m)
    t0 = time.perf_counter()
    if seed is None:
        seed = random.getrandbits(62)
    arr = text.as_array()
    index = np.arange(size, dtype=np.int64)
    stack = np.empty((1024, 3), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = size - 1
    stack[0, 2] = 0
    sp = 1
    rng = seed & 0x7FFFFFFFFFFFFFFF
    nrep = 0
    cmps = 0
    while True:
        d_rep, d_cmp, sp, rng, status = K.tqsort_run(
            index, arr, m, stack, sp, rng, POLL_INTERVAL_OPS
        )
        nrep += int(d_rep)
        cmps += int(d_cmp)
        sp = int(sp)
        rng = int(rng)
        if status == K.TQ_DONE:
            break
        if status == K.TQ_STACK_FULL:
            grown = np.empty((stack.shape[0] * 2, 3), dtype=np.int64)
            grown[: stack.shape[0]] = stack
            stack = grown
        if cancel is not None and cancel.expired():
            raise RunAborted(
                f"R3 cancelled with {sp} ranges outstanding",
                elapsed_seconds=time.perf_counter() - t0,
            )
    return RepeatsReport(
        method_id="R3",
        n=text.n,
        m=m,
        nrepeats=nrep,
        char_cmps=cmps,
        memory_bytes=8 * size,
        elapsed_seconds=time.perf_counter() - t0,
        source=text.source,
        pivot_seed=seed,
    )


_WARMED = False


def warm_kernels() -> None:
    """Compile (or load from cache) every repeat kernel; idempotent."""
    global _WARMED
    if _WARMED:
        return
    t = generate_text("random", 64, alphabet_size=4, seed=1)
    count_r0(t, 3)
    count_r1(t, 3)
    count_r2(t, 3)
    count_r3(t, 3, seed=1)
    _WARMED = True
