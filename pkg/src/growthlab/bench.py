"""Measurement harness: run a method over a geometric grid of sizes, tabulate
growth ratios, fit a power-law runtime model, and extrapolate instead of
executing runs the time budget cannot afford.

The core loop is predict-then-run: before each size, the current model (refit
after every completed record) predicts the elapsed time; predictions over the
budget become `extrapolated` records carrying the model instead of burning
hours, anything started is cancelled at 3x the budget and recorded as
`aborted_budget`, and everything else completes normally.  A skipped record
therefore always has a model that justified skipping it.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Union

import numpy as np

from . import parallel as parallel_mod
from . import primes as primes_mod
from . import repeats as repeats_mod
from .cancel import CancelToken, RunAborted
from .errors import ParameterError

# A record is re-timed until the accumulated measurement reaches this many
# seconds, so sub-millisecond runs still produce stable averages.
MIN_SAMPLE_SECONDS = 0.1
_MAX_TIMING_REPS = 1000

PRIMES_METHODS = ("M0", "M1", "M2", "M3", "M4", "M5", "parallel")
REPEATS_METHODS = ("R0", "R1", "R2", "R3")


@dataclass
class PowerLawModel:
    """t(n) ~ 10**log10_coefficient * n**exponent, fit on log10-log10 axes.

    points_used >= 2 for least-squares fits; a value of 1 marks the flat
    bootstrap model the harness falls back on when only a single observation
    exists (exponent 0: 'at least as slow as what we already saw').
    """

    exponent: float
    log10_coefficient: float
    points_used: int
    residual: float


@dataclass
class BenchRecord:
    """One (method, size) measurement.

    status is 'completed' (elapsed and op_count are measured),
    'aborted_budget' (the run was cancelled at 3x budget; elapsed is the time
    spent before the abort, op_count unknown), or 'extrapolated' (the run was
    never started; elapsed is the model's prediction, op_count is None, and
    `model` is the model that predicted over budget).
    """

    task: str
    method_id: str
    n: int
    m: Optional[int]
    elapsed_seconds: float
    op_count: Optional[int]
    status: str
    model: Optional[PowerLawModel] = None


@dataclass
class BenchSeries:
    """All records for one method over one geometric size grid."""

    task: str
    method_id: str
    m: Optional[int]
    budget_seconds: float
    records: List[BenchRecord] = field(default_factory=list)

    def completed(self) -> List[BenchRecord]:
        return [r for r in self.records if r.status == "completed"]


@dataclass
class GrowthRow:
    """One line of a growth table: the value at n, and value / previous."""

    n: int
    value: float
    ratio: Optional[float]


def fit_power_law(
    series_or_records: Union[BenchSeries, Iterable[BenchRecord]],
    metric: str = "elapsed_seconds",
) -> PowerLawModel:
    """Least-squares line through (log10 n, log10 value) over the completed
    records.  metric is 'elapsed_seconds' or 'op_count'.  Needs at least two
    usable points (positive values at distinct sizes)."""
    records = _records_of(series_or_records)
    pts = [
        (r.n, _metric_value(r, metric))
        for r in records
        if r.status == "completed"
        and _metric_value(r, metric) is not None
        and _metric_value(r, metric) > 0
    ]
    if len({n for n, _ in pts}) < 2:
        raise ParameterError(
            f"power-law fit needs >= 2 completed records with positive "
            f"{metric}, got {len(pts)}"
        )
    xs = np.log10([n for n, _ in pts])
    ys = np.log10([v for _, v in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((slope * xs + intercept - ys) ** 2)))
    return PowerLawModel(
        exponent=float(slope),
        log10_coefficient=float(intercept),
        points_used=len(pts),
        residual=resid,
    )


def extrapolate(model: PowerLawModel, n: int) -> float:
    """Predicted metric value at size n under the model."""
    if n < 1:
        raise ParameterError(f"extrapolation needs n >= 1, got {n}")
    return 10.0 ** (model.log10_coefficient + model.exponent * math.log10(n))


def growth_ratios(
    series_or_records: Union[BenchSeries, Iterable[BenchRecord]],
    metric: str = "op_count",
) -> List[GrowthRow]:
    """Tabulate metric values and successive ratios over the completed
    records.  The grid must be geometric (constant size factor); anything
    else would make the ratio column meaningless, so it is rejected."""
    records = [r for r in _records_of(series_or_records) if r.status == "completed"]
    if not records:
        raise ParameterError("growth table needs at least one completed record")
    ns = [r.n for r in records]
    if len(ns) != len(set(ns)):
        raise ParameterError("growth table needs distinct sizes")
    if len(ns) >= 3:
        factors = [ns[i + 1] / ns[i] for i in range(len(ns) - 1)]
        if any(abs(f / factors[0] - 1.0) > 1e-9 for f in factors):
            raise ParameterError(
                f"growth table needs a geometric size grid, got factors {factors}"
            )
    rows: List[GrowthRow] = []
    prev = None
    for r in records:
        v = _metric_value(r, metric)
        if v is None:
            raise ParameterError(f"record at n={r.n} has no {metric}")
        rows.append(GrowthRow(n=r.n, value=v, ratio=None if prev is None else v / prev))
        prev = v
    return rows


def _metric_value(record: BenchRecord, metric: str):
    if metric == "elapsed_seconds":
        return record.elapsed_seconds
    if metric == "op_count":
        return record.op_count
    raise ParameterError(f"unknown metric {metric!r}")


def _records_of(series_or_records) -> List[BenchRecord]:
    if isinstance(series_or_records, BenchSeries):
        return list(series_or_records.records)
    return list(series_or_records)


# ---------------------------------------------------------------------------
# Running a series
# ---------------------------------------------------------------------------

def _primes_op_count(report) -> int:
    return report.mod_ops if report.mod_ops else report.sieve_ops


def _run_once(task, method_id, n, m, segsize, text_cache, text_seed, cancel):
    """Execute one measurement; returns (elapsed_seconds, op_count)."""
    if task == "primes":
        if method_id == "M0":
            rep = primes_mod.count_m0(n, cancel=cancel)
        elif method_id == "M1":
            rep = primes_mod.count_m1(n, cancel=cancel)
        elif method_id == "M2":
            rep = primes_mod.count_m2(n, cancel=cancel)
        elif method_id == "M3":
            rep = primes_mod.count_m3(n, cancel=cancel)
        elif method_id == "M4":
            rep = primes_mod.count_m4(n, cancel=cancel)
        elif method_id == "M5":
            rep = primes_mod.count_m5(
                primes_mod.SieveConfig(n=n, segsize=segsize), cancel=cancel
            )
        elif method_id == "parallel":
            rep = parallel_mod.count_parallel(
                parallel_mod.ParallelConfig(n=n, segsize=segsize), cancel=cancel
            )
        else:
            raise ParameterError(f"unknown primes method {method_id!r}")
        return rep.elapsed_seconds, _primes_op_count(rep)
    if task == "repeats":
        if n not in text_cache:
            text_cache[n] = repeats_mod.generate_text(
                "random", n, alphabet_size=256, seed=text_seed
            )
        text = text_cache[n]
        if method_id == "R0":
            rep = repeats_mod.count_r0(text, m, cancel=cancel)
        elif method_id == "R1":
            rep = repeats_mod.count_r1(text, m, cancel=cancel)
        elif method_id == "R2":
            rep = repeats_mod.count_r2(text, m, cancel=cancel)
        elif method_id == "R3":
            # Seed fixed per size so timing repetitions measure identical work.
            rep = repeats_mod.count_r3(text, m, seed=text_seed ^ n, cancel=cancel)
        else:
            raise ParameterError(f"unknown repeats method {method_id!r}")
        return rep.elapsed_seconds, rep.char_cmps
    raise ParameterError(f"unknown task {task!r}")


def _skip_model(records: List[BenchRecord], budget: float) -> Optional[PowerLawModel]:
    """Model used for the skip decision before each run.

    With two completed records a real fit exists.  With only one observation
    (completed or aborted) there is no slope to fit, but there is still
    evidence: runtimes grow with n, so the next run takes at least as long as
    the last one did.  That is expressed as a flat model (exponent 0) through
    the single observation, marked points_used=1.
    """
    try:
        return fit_power_law(records)
    except ParameterError:
        pass
    observed = [
        r
        for r in records
        if r.status in ("completed", "aborted_budget") and r.elapsed_seconds > 0
    ]
    if observed:
        return PowerLawModel(
            exponent=0.0,
            log10_coefficient=math.log10(observed[-1].elapsed_seconds),
            points_used=1,
            residual=0.0,
        )
    return None


def size_grid(n_start: int, n_factor: float, n_max: int) -> List[int]:
    """Geometric grid n_start, ~n_start*factor, ... capped at n_max."""
    if n_start < 1:
        raise ParameterError(f"n_start must be >= 1, got {n_start}")
    if n_factor <= 1.0:
        raise ParameterError(f"n_factor must be > 1, got {n_factor}")
    if n_max < n_start:
        raise ParameterError(f"n_max must be >= n_start, got {n_max} < {n_start}")
    sizes = []
    n = n_start
    while n <= n_max:
        sizes.append(n)
        n = max(n + 1, int(round(n * n_factor)))
    return sizes


def run_series(
    task: str,
    method_id: str,
    n_start: int,
    n_factor: float,
    n_max: int,
    m: Optional[int] = None,
    budget_seconds: float = 10.0,
    segsize: int = primes_mod.DEFAULT_SEGSIZE,
    text_seed: int = 20240801,
) -> BenchSeries:
    """Measure one method over a geometric size grid under a time budget.

    Per size: predict with the current model and record `extrapolated` if the
    prediction exceeds budget_seconds; otherwise run (cancelling at 3x budget
    -> `aborted_budget`), re-timing sub-0.1s runs until the sample is stable.
    The model is refit after every completed record.
    """
    if task == "primes":
        if method_id not in PRIMES_METHODS:
            raise ParameterError(f"unknown primes method {method_id!r}")
    elif task == "repeats":
        if method_id not in REPEATS_METHODS:
            raise ParameterError(f"unknown repeats method {method_id!r}")
        if m is None or m < 1:
            raise ParameterError("repeats series needs m >= 1")
    else:
        raise ParameterError(f"unknown task {task!r}")
    if budget_seconds <= 0:
        raise ParameterError(f"budget_seconds must be > 0, got {budget_seconds}")

    primes_mod.warm_kernels()
    repeats_mod.warm_kernels()
    series = BenchSeries(
        task=task, method_id=method_id, m=m, budget_seconds=budget_seconds
    )
    text_cache: dict = {}
    for n in size_grid(n_start, n_factor, n_max):
        if task == "repeats" and m is not None and m > n:
            continue  # no valid offsets at this size yet
        model = _skip_model(series.records, budget_seconds)
        if model is not None and extrapolate(model, n) > budget_seconds:
            series.records.append(
                BenchRecord(
                    task=task,
                    method_id=method_id,
                    n=n,
                    m=m,
                    elapsed_seconds=extrapolate(model, n),
                    op_count=None,
                    status="extrapolated",
                    model=model,
                )
            )
            continue
        token = CancelToken.after(3.0 * budget_seconds)
        try:
            timings = []
            ops = None
            while True:
                elapsed, ops = _run_once(
                    task, method_id, n, m, segsize, text_cache, text_seed, token
                )
                timings.append(elapsed)
                if (
                    sum(timings) >= MIN_SAMPLE_SECONDS
                    or len(timings) >= _MAX_TIMING_REPS
                    or token.expired()
                ):
                    break
            series.records.append(
                BenchRecord(
                    task=task,
                    method_id=method_id,
                    n=n,
                    m=m,
                    elapsed_seconds=sum(timings) / len(timings),
                    op_count=ops,
                    status="completed",
                )
            )
        except RunAborted as ab:
            series.records.append(
                BenchRecord(
                    task=task,
                    method_id=method_id,
                    n=n,
                    m=m,
                    elapsed_seconds=ab.elapsed_seconds,
                    op_count=None,
                    status="aborted_budget",
                )
            )
    return series


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

_RECORD_HEADER = ["task", "method", "n", "m", "elapsed_seconds", "op_count", "status"]
_GROWTH_HEADER = ["n", "value", "ratio_to_previous"]


def emit_csv(obj, destination) -> None:
    """Write a BenchSeries (or list of records, or growth table) as CSV.

    destination is a path or a writable text file.  Floats are written with
    repr so parse_csv restores them bit-for-bit.
    """
    rows: List[List[str]]
    if isinstance(obj, BenchSeries):
        records = obj.records
        header, rows = _RECORD_HEADER, [_record_row(r) for r in records]
    elif isinstance(obj, list) and obj and isinstance(obj[0], GrowthRow):
        header = _GROWTH_HEADER
        rows = [
            [str(g.n), repr(float(g.value)), "" if g.ratio is None else repr(g.ratio)]
            for g in obj
        ]
    else:
        header, rows = _RECORD_HEADER, [_record_row(r) for r in obj]
    try:
        if hasattr(destination, "write"):
            _write_csv(destination, header, rows)
        else:
            with open(destination, "w", encoding="utf-8", newline="") as fh:
                _write_csv(fh, header, rows)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {destination}: {exc}") from exc


def _record_row(r: BenchRecord) -> List[str]:
    return [
        r.task,
        r.method_id,
        str(r.n),
        "" if r.m is None else str(r.m),
        repr(r.elapsed_seconds),
        "" if r.op_count is None else str(r.op_count),
        r.status,
    ]


def _write_csv(fh, header, rows):
    writer = csv.writer(fh)
    writer.writerow(header)
    writer.writerows(rows)


def parse_csv(source) -> List[BenchRecord]:
    """Read back a record CSV produced by emit_csv.  Model references are not
    serialized, so extrapolated records come back with model=None."""
    if hasattr(source, "read"):
        reader = csv.reader(source)
        return _parse_rows(reader, getattr(source, "name", "<stream>"))
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _parse_rows(csv.reader(fh), source)


def _parse_rows(reader, name) -> List[BenchRecord]:
    rows = list(reader)
    if not rows or rows[0] != _RECORD_HEADER:
        raise ParameterError(f"{name}: not a bench-record CSV (bad header)")
    records = []
    for row in rows[1:]:
        if len(row) != len(_RECORD_HEADER):
            raise ParameterError(f"{name}: malformed row {row!r}")
        task, method, n, m, elapsed, ops, status = row
        records.append(
            BenchRecord(
                task=task,
                method_id=method,
                n=int(n),
                m=None if m == "" else int(m),
                elapsed_seconds=float(elapsed),
                op_count=None if ops == "" else int(ops),
                status=status,
            )
        )
    return records


# ---------------------------------------------------------------------------
# Transcripts
# ---------------------------------------------------------------------------

_PRIMES_TITLES = {
    "M0": "Primes 0: Trial division, no early exit",
    "M1": "Primes 1: Trial division, stop at first factor",
    "M2": "Primes 2: Trial division, stop at square root",
    "M3": "Primes 3: Trial division by smaller primes only",
    "M4": "Primes 4: Sieve of Eratosthenes",
    "M5": "Primes 5: Segmented sieve, bells and whistles",
    "parallel": "Primes 5: Segmented sieve, parallel workers",
}

_REPEATS_TITLES = {
    "R0": "Repeats 0: Compare all pairs, all characters",
    "R1": "Repeats 1: Compare all pairs, stop at mismatch",
    "R2": "Repeats 2: Build suffix array using mergesort",
    "R3": "Repeats 3: Build suffix array using ternary quicksort",
}

_PRIMES_KEY_WIDTH = 26
_REPEATS_KEY_WIDTH = 20


def _banner(title: str) -> List[str]:
    rule = "-" * len(title)
    return [rule, title, rule]


def _count_with_shorthand(value: int) -> str:
    """1,000,000,000,000 = 1e+12 — the shorthand appears once the %g form
    switches to scientific notation."""
    g = f"{float(value):g}"
    base = f"{value:,}"
    return f"{base} = {g}" if "e" in g else base


def _kv(key: str, value: str, width: int) -> str:
    return f"{key:<{width}}= {value}"


def transcript_primes(report) -> str:
    """Render a prime run the way the CLI prints it: banner, then key = value
    lines with comma-grouped counts, memory in MiB, density as a percentage,
    and seconds to millisecond precision."""
    title = _PRIMES_TITLES[report.method_id]
    lines = _banner(title)
    kv = lambda k, v: lines.append(_kv(k, v, _PRIMES_KEY_WIDTH))
    kv("finding primes up to n", _count_with_shorthand(report.n))
    segmented = report.method_id in ("M5", "parallel")
    if segmented:
        kv("number of primes < sqrtn", f"{report.sqrt_nprimes:,}")
        if report.sqrt_last_prime is not None:
            kv("last of those primes", f"{report.sqrt_last_prime:,}")
        if report.workers is not None:
            kv("worker threads", f"{report.workers:,}")
        kv("memory space used", f"{report.memory_bytes / 2**20:.1f} MiB")
    kv("number of primes < n", f"{report.nprimes:,}")
    if segmented:
        kv("density of primes", f"{100.0 * report.density:.2f}%")
    if report.last_prime is not None:
        kv("last of those primes", f"{report.last_prime:,}")
    if not segmented:
        if report.mod_ops:
            kv("mod operations", f"{report.mod_ops:,}")
        if report.sieve_ops:
            kv("sieve operations", f"{report.sieve_ops:,}")
        kv("memory space used", f"{report.memory_bytes / 2**20:.1f} MiB")
        kv("density of primes", f"{100.0 * report.density:.2f}%")
    kv("computation time", f"{report.elapsed_seconds:.3f} seconds")
    return "\n".join(lines)


def transcript_repeats(report) -> str:
    """Render a repeat run: text size (with provenance), m, index memory,
    repeat count, and time."""
    title = _REPEATS_TITLES[report.method_id]
    lines = _banner(title)
    kv = lambda k, v: lines.append(_kv(k, v, _REPEATS_KEY_WIDTH))
    size = _count_with_shorthand(report.n)
    if report.source:
        size += f" from {report.source}"
    kv("text size n", size)
    kv("repeat length m", f"{report.m:,}")
    kv("memory space used", f"{report.memory_bytes / 2**20:.1f} MiB")
    kv("number of m-repeats", f"{report.nrepeats:,}")
    kv("computation time", f"{report.elapsed_seconds:.3f} seconds")
    return "\n".join(lines)


def emit_transcript(report) -> str:
    """Format any counting report as its CLI transcript."""
    if isinstance(report, primes_mod.PrimesReport):
        return transcript_primes(report)
    if isinstance(report, repeats_mod.RepeatsReport):
        return transcript_repeats(report)
    raise ParameterError(f"no transcript format for {type(report).__name__}")


def format_series(series: BenchSeries) -> str:
    """Console summary of a series: per-record lines plus a growth table over
    whichever records completed."""
    out = io.StringIO()
    head = f"{series.task} {series.method_id}"
    if series.m is not None:
        head += f" (m={series.m})"
    head += f", budget {series.budget_seconds:g}s"
    out.write(head + "\n")
    out.write(
        f"{'n':>16} {'elapsed_s':>14} {'op_count':>22} {'status':<14}\n"
    )
    for r in series.records:
        ops = "" if r.op_count is None else f"{r.op_count:,}"
        out.write(
            f"{r.n:>16,} {r.elapsed_seconds:>14.6f} {ops:>22} {r.status:<14}\n"
        )
    completed = series.completed()
    if len(completed) >= 2 and all(r.op_count is not None for r in completed):
        try:
            rows = growth_ratios(series, metric="op_count")
        except ParameterError:
            rows = []
        if rows:
            out.write("growth of op_count:\n")
            for g in rows:
                ratio = "" if g.ratio is None else f"  x{g.ratio:.1f}"
                out.write(f"{g.n:>16,} {g.value:>22,.0f}{ratio}\n")
    return out.getvalue()
