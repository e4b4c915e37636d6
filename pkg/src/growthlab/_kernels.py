"""Compiled inner loops for the prime and repeat counters.

Everything here is numba-compiled, operates on explicit ranges so the drivers
can poll for cancellation between calls, and returns exact operation counts.
All kernels release the GIL so the parallel sieve can run them from threads.

Overflow discipline: no kernel ever forms d*d or v*v without first checking
d <= c // d (equivalently v <= limit // v), so squares are only computed when
they fit; segment arithmetic stays within int64 because p <= sqrt(n).
"""

import numpy as np
from numba import njit


# ---------------------------------------------------------------------------
# Prime counting: trial-division ladder
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def m0_range(lo, hi):
    """Trial division, no early exit: every d in [2, c) is tried."""
    nprimes = 0
    ops = 0
    last = -1
    for c in range(lo, hi):
        isprime = 1
        for d in range(2, c):
            ops += 1
            if c % d == 0:
                isprime = 0  # keep dividing anyway
        if isprime == 1:
            nprimes += 1
            last = c
    return nprimes, ops, last


@njit(cache=True, nogil=True)
def m1_range(lo, hi):
    """Trial division, stop at the first factor."""
    nprimes = 0
    ops = 0
    last = -1
    for c in range(lo, hi):
        isprime = 1
        for d in range(2, c):
            ops += 1
            if c % d == 0:
                isprime = 0
                break
        if isprime == 1:
            nprimes += 1
            last = c
    return nprimes, ops, last


@njit(cache=True, nogil=True)
def m2_range(lo, hi):
    """Trial division, stop once d exceeds sqrt(c).

    The bound is tested as d <= c // d; the guard division is bookkeeping,
    not a divisibility probe, so it is not added to ops.
    """
    nprimes = 0
    ops = 0
    last = -1
    for c in range(lo, hi):
        isprime = 1
        d = 2
        while d <= c // d:
            ops += 1
            if c % d == 0:
                isprime = 0
                break
            d += 1
        if isprime == 1:
            nprimes += 1
            last = c
    return nprimes, ops, last


@njit(cache=True, nogil=True)
def m3_range(primes, count, lo, hi):
    """Trial division by previously found primes only.

    `primes[:count]` holds every prime below lo, in order.  Newly found
    primes are appended; when the array is full the kernel returns early with
    full=1 and next_c pointing at the first unprocessed candidate, so the
    caller can grow the array and resume without re-counting any division.
    Returns (count, ops, last, next_c, full).
    """
    ops = 0
    last = -1
    c = lo
    while c < hi:
        if count == primes.shape[0]:
            return count, ops, last, c, 1
        isprime = 1
        for i in range(count):
            d = primes[i]
            if d > c // d:
                break
            ops += 1
            if c % d == 0:
                isprime = 0
                break
        if isprime == 1:
            primes[count] = c
            count += 1
            last = c
        c += 1
    return count, ops, last, c, 0


# ---------------------------------------------------------------------------
# Prime counting: sieves
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def m4_range(flags, n, v_lo, v_hi):
    """One slab of the flat sieve: test candidates in [v_lo, v_hi), and for
    each survivor v eliminate v*v, v*v+v, ... below n.

    Returns (nprimes, eliminations, tests, last).
    """
    nprimes = 0
    elims = 0
    tests = 0
    last = -1
    for v in range(v_lo, v_hi):
        tests += 1
        if flags[v] == 1:
            nprimes += 1
            last = v
            if v <= (n - 1) // v:  # only then is v*v < n, and safe to form
                c = v * v
                while c < n:
                    flags[c] = 0
                    elims += 1
                    c += v
    return nprimes, elims, tests, last


@njit(cache=True, nogil=True)
def sieve_primes_upto(limit):
    """All primes <= limit as an int64 array (flat sieve, used to bootstrap
    the segmented methods)."""
    if limit < 2:
        return np.empty(0, np.int64)
    flags = np.ones(limit + 1, np.uint8)
    for v in range(2, limit + 1):
        if flags[v] == 1:
            if v <= limit // v:
                c = v * v
                while c <= limit:
                    flags[c] = 0
                    c += v
    count = 0
    for v in range(2, limit + 1):
        if flags[v] == 1:
            count += 1
    out = np.empty(count, np.int64)
    k = 0
    for v in range(2, limit + 1):
        if flags[v] == 1:
            out[k] = v
            k += 1
    return out


@njit(cache=True, nogil=True)
def _init_segment(buf, bot, top):
    """Reset a segment to all-ones, then clear even candidates by stepping a
    fixed pattern (2 itself is re-marked when it falls in the segment)."""
    seg = top - bot
    for k in range(seg):
        buf[k] = 1
    first_even = 0 if bot % 2 == 0 else 1
    for k in range(first_even, seg, 2):
        buf[k] = 0
    if bot <= 2 and 2 < top:
        buf[2 - bot] = 1


@njit(cache=True, nogil=True)
def _scan_segment(buf, bot, top):
    """Count and locate survivors; candidates below 2 are never counted."""
    nprimes = 0
    tests = 0
    last = -1
    lo = bot
    if lo < 2:
        lo = 2
    for c in range(lo, top):
        tests += 1
        if buf[c - bot] == 1:
            nprimes += 1
            last = c
    return nprimes, tests, last


@njit(cache=True, nogil=True)
def m5_segment(primes, nxt, buf, bot, top):
    """Sequential segmented sieve step over [bot, top).

    `primes` holds the odd primes <= sqrt(n); `nxt[i]` is the next multiple
    of primes[i] not yet eliminated and is advanced in place, so segments
    must be visited in order.  Returns (nprimes, elims, tests, last).
    """
    _init_segment(buf, bot, top)
    elims = 0
    for i in range(primes.shape[0]):
        p = primes[i]
        c = nxt[i]
        while c < top:
            buf[c - bot] = 0
            elims += 1
            c += p
        nxt[i] = c
    nprimes, tests, last = _scan_segment(buf, bot, top)
    return nprimes, elims, tests, last


@njit(cache=True, nogil=True)
def pseg_segment(primes, buf, bot, top):
    """Order-independent segmented sieve step over [bot, top).

    Instead of carrying next-multiple state between segments, each prime's
    starting point is recomputed as max(p*p, first multiple of p >= bot); the
    remainder evaluations that cost is reported in mod_ops.  Safe to run on
    arbitrary segments from concurrent threads (disjoint buffers).
    Returns (nprimes, elims, tests, last, mod_ops).
    """
    _init_segment(buf, bot, top)
    elims = 0
    mod_ops = 0
    for i in range(primes.shape[0]):
        p = primes[i]
        c = p * p  # p <= sqrt(n) so p*p fits int64
        if c < bot:
            r = bot % p
            mod_ops += 1
            if r == 0:
                c = bot
            else:
                c = bot + (p - r)
        while c < top:
            buf[c - bot] = 0
            elims += 1
            c += p
    nprimes, tests, last = _scan_segment(buf, bot, top)
    return nprimes, elims, tests, last, mod_ops


# ---------------------------------------------------------------------------
# Repeated substrings
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def r0_range(text, m, i_lo, i_hi):
    """All-pairs repeat test with no early exits: every earlier position j is
    compared against i over all m characters, and every j is tried even after
    a match.  Counts position i as repeated if any j matched."""
    nrep = 0
    cmps = 0
    for i in range(i_lo, i_hi):
        found = 0
        for j in range(i):
            equal = 1
            for k in range(m):
                cmps += 1
                if text[j + k] != text[i + k]:
                    equal = 0  # keep comparing anyway
            if equal == 1:
                found = 1  # keep scanning earlier positions anyway
        nrep += found
    return nrep, cmps


@njit(cache=True, nogil=True)
def r1_range(text, m, i_lo, i_hi):
    """All-pairs repeat test with both early exits: a character mismatch ends
    the pair, and the first matching j ends the scan for i."""
    nrep = 0
    cmps = 0
    for i in range(i_lo, i_hi):
        for j in range(i):
            equal = 1
            for k in range(m):
                cmps += 1
                if text[j + k] != text[i + k]:
                    equal = 0
                    break
            if equal == 1:
                nrep += 1
                break
    return nrep, cmps


@njit(cache=True, nogil=True)
def msort_pass(src, dst, text, m, width):
    """One bottom-up mergesort pass over the suffix index: merge consecutive
    sorted blocks of `width` entries from src into dst, ordering entries by
    the first m characters of their suffixes.  Returns characters compared.
    Ties keep the left (lower-index) entry first, so the sort is stable."""
    cmps = 0
    n = src.shape[0]
    lo = 0
    while lo < n:
        mid = lo + width
        if mid > n:
            mid = n
        hi = lo + 2 * width
        if hi > n:
            hi = n
        i = lo
        j = mid
        k = lo
        while i < mid and j < hi:
            a = src[i]
            b = src[j]
            rel = 0
            for c in range(m):
                cmps += 1
                ca = text[a + c]
                cb = text[b + c]
                if ca != cb:
                    rel = -1 if ca < cb else 1
                    break
            if rel <= 0:
                dst[k] = a
                i += 1
            else:
                dst[k] = b
                j += 1
            k += 1
        while i < mid:
            dst[k] = src[i]
            i += 1
            k += 1
        while j < hi:
            dst[k] = src[j]
            j += 1
            k += 1
        lo = hi
    return cmps


@njit(cache=True, nogil=True)
def scan_adjacent(index, text, m):
    """Count entries of a sorted suffix index whose m-prefix equals the
    previous entry's.  Returns (nrepeats, cmps)."""
    nrep = 0
    cmps = 0
    for i in range(1, index.shape[0]):
        a = index[i - 1]
        b = index[i]
        equal = 1
        for k in range(m):
            cmps += 1
            if text[a + k] != text[b + k]:
                equal = 0
                break
        nrep += equal
    return nrep, cmps


# tqsort_run status codes
TQ_DONE = 0
TQ_PAUSED = 1
TQ_STACK_FULL = 2

_TQ_LCG_MUL = 6364136223846793005
_TQ_LCG_ADD = 1442695040888963407
_TQ_MASK63 = 0x7FFFFFFFFFFFFFFF


@njit(cache=True, nogil=True)
def tqsort_run(index, text, m, stack, sp, rng, max_steps):
    """Resumable depth-tracking ternary quicksort over the suffix index.

    Each stack row is (lo, hi, depth): sort index[lo..hi] inclusive by
    character `depth` of the suffixes, having already grouped them on the
    first `depth` characters.  Ranges reaching depth == m hold hi-lo+1
    suffixes that agree on all m characters, i.e. hi-lo repeated positions.
    Pivots are drawn from a 63-bit linear congruential sequence (the wrap is
    deliberate hashing, not value arithmetic) so adversarial inputs cannot
    force worst-case partitions; rng is the live generator state.

    Pauses after ~max_steps element visits, or when a partition's three
    children might not fit on the stack.  Returns
    (nrepeats, cmps, sp, rng, status).
    """
    nrep = 0
    cmps = 0
    steps = 0
    while sp > 0:
        if steps >= max_steps:
            return nrep, cmps, sp, rng, TQ_PAUSED
        if sp + 3 > stack.shape[0]:
            return nrep, cmps, sp, rng, TQ_STACK_FULL
        sp -= 1
        lo = stack[sp, 0]
        hi = stack[sp, 1]
        depth = stack[sp, 2]
        steps += 1
        if lo >= hi:
            continue
        if depth == m:
            nrep += hi - lo
            continue
        span = hi - lo + 1
        rng = (rng * _TQ_LCG_MUL + _TQ_LCG_ADD) & _TQ_MASK63
        pivot = text[index[lo + rng % span] + depth]
        # Three-way partition on the character at `depth`.
        lt = lo
        gt = hi
        i = lo
        while i <= gt:
            ch = text[index[i] + depth]
            cmps += 1
            if ch < pivot:
                tmp = index[lt]
                index[lt] = index[i]
                index[i] = tmp
                lt += 1
                i += 1
            elif ch > pivot:
                tmp = index[gt]
                index[gt] = index[i]
                index[i] = tmp
                gt -= 1
            else:
                i += 1
        steps += span
        stack[sp, 0] = lo
        stack[sp, 1] = lt - 1
        stack[sp, 2] = depth
        sp += 1
        stack[sp, 0] = lt
        stack[sp, 1] = gt
        stack[sp, 2] = depth + 1
        sp += 1
        stack[sp, 0] = gt + 1
        stack[sp, 1] = hi
        stack[sp, 2] = depth
        sp += 1
    return nrep, cmps, 0, rng, TQ_DONE
