import pytest

import growthlab as gl
import growthlab.primes
import growthlab.repeats


@pytest.fixture(scope="session", autouse=True)
def warm_all_kernels():
    """Compile (or cache-load) every kernel once so timed assertions measure
    the algorithms, not JIT latency."""
    growthlab.primes.warm_kernels()
    growthlab.repeats.warm_kernels()
    gl.count_parallel(gl.ParallelConfig(n=64, segsize=16, workers=2))
