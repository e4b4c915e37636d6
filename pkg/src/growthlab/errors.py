"""Exception types shared across the library."""


class GrowthLabError(Exception):
    """Base class for all library-raised errors."""


class ParameterError(GrowthLabError, ValueError):
    """An argument or configuration value is outside its documented domain."""


class MemoryCapError(GrowthLabError, MemoryError):
    """An allocation would exceed the configured memory cap.

    The message always names the requested size so a refused run can be
    re-planned (smaller n, larger cap, or the segmented method).
    """

    def __init__(self, what: str, requested_bytes: int, cap_bytes: int):
        self.what = what
        self.requested_bytes = int(requested_bytes)
        self.cap_bytes = int(cap_bytes)
        super().__init__(
            f"{what} needs {self.requested_bytes:,} bytes "
            f"but the memory cap is {self.cap_bytes:,} bytes"
        )
