"""growthlab: two ladders of increasingly efficient counting algorithms
(primes below n, repeated length-m substrings), instrumented with exact
operation counts, plus a bench harness that measures growth ratios, fits
power-law runtime models, and extrapolates runs a time budget cannot afford.
"""

from .bench import (
    BenchRecord,
    BenchSeries,
    GrowthRow,
    PowerLawModel,
    emit_csv,
    emit_transcript,
    extrapolate,
    fit_power_law,
    growth_ratios,
    parse_csv,
    run_series,
    size_grid,
)
from .cancel import CancelToken, RunAborted
from .errors import GrowthLabError, MemoryCapError, ParameterError
from .parallel import (
    ParallelConfig,
    count_parallel,
    first_multiple_in_segment,
    speedup_curve,
)
from .primes import (
    DEFAULT_MEMORY_CAP,
    DEFAULT_SEGSIZE,
    PrimesReport,
    SieveConfig,
    bootstrap_primes,
    count_m0,
    count_m1,
    count_m2,
    count_m3,
    count_m4,
    count_m5,
    m0_mod_ops,
)
from .repeats import (
    RepeatsReport,
    SuffixIndex,
    Text,
    build_suffix_index,
    count_r0,
    count_r1,
    count_r2,
    count_r3,
    generate_text,
    read_text,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "BenchSeries",
    "CancelToken",
    "DEFAULT_MEMORY_CAP",
    "DEFAULT_SEGSIZE",
    "GrowthLabError",
    "GrowthRow",
    "MemoryCapError",
    "ParallelConfig",
    "ParameterError",
    "PowerLawModel",
    "PrimesReport",
    "RepeatsReport",
    "RunAborted",
    "SieveConfig",
    "SuffixIndex",
    "Text",
    "bootstrap_primes",
    "build_suffix_index",
    "count_m0",
    "count_m1",
    "count_m2",
    "count_m3",
    "count_m4",
    "count_m5",
    "count_parallel",
    "count_r0",
    "count_r1",
    "count_r2",
    "count_r3",
    "emit_csv",
    "emit_transcript",
    "extrapolate",
    "first_multiple_in_segment",
    "fit_power_law",
    "generate_text",
    "growth_ratios",
    "m0_mod_ops",
    "parse_csv",
    "read_text",
    "run_series",
    "size_grid",
    "speedup_curve",
]
