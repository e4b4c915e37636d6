"""Cooperative cancellation for long-running counting loops.

The counting functions never block forever: they slice their work into slabs
of roughly POLL_INTERVAL_OPS inner-loop operations and poll a CancelToken
between slabs.  A token can be cancelled explicitly or armed with a deadline;
either way the running function raises RunAborted at the next poll, carrying
the time spent so far.  Slab sizing is tuned for the typical case, so a poll
may overshoot the interval by a bounded factor on adversarial inputs.
"""

from __future__ import annotations

import time

# Target number of inner-loop operations between cancellation polls.
POLL_INTERVAL_OPS = 1 << 20


class RunAborted(Exception):
    """Raised inside a counting function when its CancelToken fires."""

    def __init__(self, message: str, elapsed_seconds: float = 0.0):
        super().__init__(message)
        self.elapsed_seconds = elapsed_seconds


class CancelToken:
    """A flag polled by counting loops; optionally armed with a deadline."""

    def __init__(self, deadline: float | None = None):
        self._cancelled = False
        self._deadline = deadline

    @classmethod
    def after(cls, seconds: float) -> "CancelToken":
        """Token that expires `seconds` from now (perf_counter clock)."""
        return cls(deadline=time.perf_counter() + seconds)

    def cancel(self) -> None:
        self._cancelled = True

    def expired(self) -> bool:
        if self._cancelled:
            return True
        return self._deadline is not None and time.perf_counter() > self._deadline
