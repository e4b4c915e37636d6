"""Command-line front end.

Four subcommands mirror the library: `primes` and `repeats` run one counting
method and print its transcript, `bench` measures methods over a size grid
and tabulates growth, `speedup` sweeps the parallel sieve over worker counts.
Counts accept scientific notation and underscores (1e12, 8_388_608).  Exit
codes: 0 success, 2 usage error (argparse), 1 runtime failure (bad file,
memory cap, ...).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import bench as bench_mod
from . import parallel as parallel_mod
from . import primes as primes_mod
from . import repeats as repeats_mod
from .errors import GrowthLabError


def parse_count(s: str) -> int:
    """Non-negative integer, allowing 1e12 / 10_000_000 / 8,388,608 forms."""
    text = s.strip().replace(",", "")
    try:
        if any(c in text for c in "eE."):
            value = float(text)
            rounded = int(round(value))
            if rounded < 0 or abs(value - rounded) > 1e-6 * max(1.0, abs(value)):
                raise ValueError
            return rounded
        value = int(text)
        if value < 0:
            raise ValueError
        return value
    except (ValueError, OverflowError):
        raise argparse.ArgumentTypeError(
            f"{s!r} is not a non-negative integer count"
        ) from None


def _int_list(s: str) -> list:
    try:
        return [int(tok) for tok in s.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a comma-separated int list")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growthlab",
        description="Instrumented prime-counting and repeat-counting methods "
        "with growth measurement and runtime extrapolation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primes", help="count primes below n with one method")
    p.add_argument(
        "--method",
        required=True,
        choices=["0", "1", "2", "3", "4", "5", "parallel"],
        help="ladder rung: 0-3 trial division, 4 flat sieve, 5 segmented, "
        "parallel = segmented with a worker pool",
    )
    p.add_argument("--n", required=True, type=parse_count, help="count primes below n")
    p.add_argument(
        "--segsize",
        type=parse_count,
        default=primes_mod.DEFAULT_SEGSIZE,
        help="segment size in bytes for methods 5/parallel (default 2**23)",
    )
    p.add_argument(
        "--threads",
        type=int,
        default=max(1, os.cpu_count() or 1),
        help="worker threads for --method parallel (default: one per CPU)",
    )
    p.add_argument(
        "--memory-cap",
        type=parse_count,
        default=primes_mod.DEFAULT_MEMORY_CAP,
        help="refuse allocations beyond this many bytes (default 2**31)",
    )
    p.add_argument(
        "--verbose",
        action="store_true",
        help="print a progress heartbeat while sieving segments",
    )

    r = sub.add_parser("repeats", help="count repeated length-m substrings")
    r.add_argument(
        "--method",
        required=True,
        choices=["0", "1", "2", "3"],
        help="0/1 pair scans, 2 mergesort suffix index, 3 ternary quicksort",
    )
    r.add_argument("--m", required=True, type=parse_count, help="repeat length")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="literal text (UTF-8 encoded)")
    src.add_argument("--input", help="read the text from this file")
    src.add_argument(
        "--random", type=parse_count, metavar="N", help="random text of N bytes"
    )
    src.add_argument(
        "--all-equal", type=parse_count, metavar="N", help="N copies of one letter"
    )
    src.add_argument(
        "--periodic", type=parse_count, metavar="N", help="periodic text of N bytes"
    )
    r.add_argument(
        "--max-bytes",
        type=parse_count,
        default=None,
        help="with --input: use only the first N bytes",
    )
    r.add_argument(
        "--alphabet", type=int, default=256, help="with --random: alphabet size"
    )
    r.add_argument("--seed", type=int, default=1, help="with --random: generator seed")
    r.add_argument(
        "--period", type=int, default=3, help="with --periodic: pattern length"
    )
    r.add_argument(
        "--pivot-seed",
        type=int,
        default=None,
        help="method 3 pivot seed (default: drawn fresh and reported)",
    )

    b = sub.add_parser("bench", help="measure methods over a geometric size grid")
    b.add_argument("--task", required=True, choices=["primes", "repeats"])
    b.add_argument(
        "--methods",
        required=True,
        help="comma-separated methods, e.g. 0,2,3 or M2,M5 or R1,R2",
    )
    b.add_argument("--n-start", required=True, type=parse_count)
    b.add_argument("--n-factor", type=float, default=10.0)
    b.add_argument("--n-max", required=True, type=parse_count)
    b.add_argument("--m", type=parse_count, default=None, help="repeat length")
    b.add_argument(
        "--budget",
        type=float,
        default=10.0,
        help="per-run budget in seconds; predicted-over-budget runs are "
        "extrapolated from the fitted model instead of executed",
    )
    b.add_argument(
        "--segsize", type=parse_count, default=primes_mod.DEFAULT_SEGSIZE
    )
    b.add_argument("--csv", help="also write every record to this CSV file")

    s = sub.add_parser("speedup", help="parallel sieve elapsed time vs workers")
    s.add_argument("--n", required=True, type=parse_count)
    s.add_argument("--segsize", type=parse_count, default=primes_mod.DEFAULT_SEGSIZE)
    s.add_argument(
        "--workers", type=_int_list, default=[1, 2, 4, 8],
        help="comma-separated worker counts (default 1,2,4,8)",
    )
    s.add_argument("--reps", type=int, default=3, help="repetitions per point")
    s.add_argument("--csv", help="write workers,elapsed_seconds,nprimes rows here")
    return parser


def _heartbeat(min_gap_seconds: float = 2.0):
    last = [0.0]

    def cb(top, n, count):
        now = time.perf_counter()
        if now - last[0] >= min_gap_seconds or top >= n:
            last[0] = now
            pct = 100.0 * top / n if n else 100.0
            print(
                f"  [{pct:5.1f}%] below {top:,}: {count:,} primes so far",
                file=sys.stderr,
            )

    return cb


def _method_token(task: str, token: str) -> str:
    token = token.strip().upper()
    if token in ("PARALLEL", "P"):
        return "parallel"
    if token.isdigit():
        return ("M" if task == "primes" else "R") + token
    return token


def _cmd_primes(args) -> int:
    progress = _heartbeat() if args.verbose else None
    if args.method == "parallel":
        report = parallel_mod.count_parallel(
            parallel_mod.ParallelConfig(
                n=args.n,
                segsize=args.segsize,
                workers=args.threads,
                memory_cap=args.memory_cap,
            ),
            progress=progress,
        )
    elif args.method == "5":
        report = primes_mod.count_m5(
            primes_mod.SieveConfig(
                n=args.n, segsize=args.segsize, memory_cap=args.memory_cap
            ),
            progress=progress,
        )
    elif args.method == "4":
        report = primes_mod.count_m4(args.n, memory_cap=args.memory_cap)
    else:
        counter = {
            "0": primes_mod.count_m0,
            "1": primes_mod.count_m1,
            "2": primes_mod.count_m2,
            "3": primes_mod.count_m3,
        }[args.method]
        report = counter(args.n)
    print(bench_mod.emit_transcript(report))
    return 0


def _cmd_repeats(args) -> int:
    if args.text is not None:
        text = repeats_mod.Text.from_str(args.text)
    elif args.input is not None:
        text = repeats_mod.read_text(args.input, max_bytes=args.max_bytes)
    elif args.random is not None:
        text = repeats_mod.generate_text(
            "random", args.random, alphabet_size=args.alphabet, seed=args.seed
        )
    elif args.all_equal is not None:
        text = repeats_mod.generate_text("all-equal", args.all_equal)
    else:
        text = repeats_mod.generate_text("periodic", args.periodic, period=args.period)
    if args.method == "0":
        report = repeats_mod.count_r0(text, args.m)
    elif args.method == "1":
        report = repeats_mod.count_r1(text, args.m)
    elif args.method == "2":
        report = repeats_mod.count_r2(text, args.m)
    else:
        report = repeats_mod.count_r3(text, args.m, seed=args.pivot_seed)
        print(f"pivot seed {report.pivot_seed}", file=sys.stderr)
    print(bench_mod.emit_transcript(report))
    return 0


def _cmd_bench(args) -> int:
    methods = [_method_token(args.task, tok) for tok in args.methods.split(",")]
    all_records = []
    for method_id in methods:
        series = bench_mod.run_series(
            task=args.task,
            method_id=method_id,
            n_start=args.n_start,
            n_factor=args.n_factor,
            n_max=args.n_max,
            m=args.m,
            budget_seconds=args.budget,
            segsize=args.segsize,
        )
        print(bench_mod.format_series(series))
        all_records.extend(series.records)
    if args.csv:
        bench_mod.emit_csv(all_records, args.csv)
        print(f"wrote {len(all_records)} records to {args.csv}")
    return 0


def _cmd_speedup(args) -> int:
    rows = parallel_mod.speedup_curve(
        n=args.n,
        segsize=args.segsize,
        worker_counts=tuple(args.workers),
        repetitions=args.reps,
        csv_path=args.csv,
    )
    baseline = rows[0][1]
    print(f"{'workers':>8} {'elapsed_s':>12} {'speedup':>8} {'nprimes':>16}")
    for workers, elapsed, nprimes in rows:
        label = "seq" if workers == 0 else str(workers)
        ratio = baseline / elapsed if elapsed > 0 else float("inf")
        print(f"{label:>8} {elapsed:>12.3f} {ratio:>8.2f} {nprimes:>16,}")
    if args.csv:
        print(f"wrote speedup curve to {args.csv}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0)
    try:
        if args.command == "primes":
            return _cmd_primes(args)
        if args.command == "repeats":
            return _cmd_repeats(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_speedup(args)
    except (GrowthLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
