"""Bench harness: power-law fits, extrapolation arithmetic, predict-then-run
budget behaviour, growth tables, CSV round-trips, and transcript formatting."""

import io
import math

import pytest

import growthlab as gl
from growthlab import bench


def _rec(n, elapsed, ops=1, status="completed", task="primes", method="M1", m=None):
    return gl.BenchRecord(
        task=task, method_id=method, n=n, m=m,
        elapsed_seconds=elapsed, op_count=ops, status=status,
    )


# ---------------------------------------------------------------------------
# Fitting and extrapolation
# ---------------------------------------------------------------------------

def test_two_point_fit_is_exact():
    model = gl.fit_power_law([_rec(10**4, 0.03), _rec(10**5, 3.0)])
    assert model.points_used == 2
    assert abs(model.exponent - 2.0) < 1e-12
    assert math.isclose(gl.extrapolate(model, 10**4), 0.03, rel_tol=1e-12)
    assert math.isclose(gl.extrapolate(model, 10**5), 3.0, rel_tol=1e-12)


def test_extrapolation_seconds_to_hours():
    # 0.03s at 1e4 and 3s at 1e5 imply 300s at 1e6 and ~8.3 hours at 1e7
    model = gl.fit_power_law([_rec(10**4, 0.03), _rec(10**5, 3.0)])
    assert math.isclose(gl.extrapolate(model, 10**6), 300.0, rel_tol=1e-9)
    hours = gl.extrapolate(model, 10**7) / 3600.0
    assert math.isclose(hours, 30_000.0 / 3600.0, rel_tol=1e-9)


def test_fit_recovers_known_exponents():
    for k in (1.0, 1.5, 3.0):
        records = [_rec(n, 1e-7 * n**k) for n in (10**3, 10**4, 10**5, 10**6)]
        model = gl.fit_power_law(records)
        assert abs(model.exponent - k) < 1e-9
        assert model.residual < 1e-9
        assert model.points_used == 4


def test_fit_requires_two_completed_points():
    with pytest.raises(gl.ParameterError):
        gl.fit_power_law([_rec(10**4, 0.03)])
    with pytest.raises(gl.ParameterError):
        gl.fit_power_law(
            [_rec(10**4, 0.03), _rec(10**5, 3.0, status="extrapolated")]
        )
    with pytest.raises(gl.ParameterError):
        gl.fit_power_law([_rec(10**4, 0.03), _rec(10**4, 0.04)])  # same size


def test_op_count_metric_slope_for_sqrt_bounded_division():
    # exact M2 division counts, frozen in test_primes, give slope ~1.40
    from test_primes import MOD_OPS

    records = [_rec(n, 1.0, ops=MOD_OPS[n]["M2"]) for n in sorted(MOD_OPS)]
    model = gl.fit_power_law(records, metric="op_count")
    assert abs(model.exponent - 1.40) < 0.05


# ---------------------------------------------------------------------------
# Growth tables
# ---------------------------------------------------------------------------

def test_growth_ratios_chain_identity():
    series = gl.run_series("primes", "M3", 10**3, 10.0, 10**5, budget_seconds=1e9)
    rows = gl.growth_ratios(series, metric="op_count")
    assert rows[0].ratio is None
    product = rows[0].value
    for row in rows[1:]:
        product *= row.ratio
    assert math.isclose(product, rows[-1].value, rel_tol=1e-12)


def test_growth_ratios_reject_non_geometric_grid():
    records = [_rec(10**3, 0.1), _rec(10**4, 0.2), _rec(5 * 10**4, 0.3)]
    with pytest.raises(gl.ParameterError):
        gl.growth_ratios(records, metric="elapsed_seconds")
    with pytest.raises(gl.ParameterError):
        gl.growth_ratios([], metric="op_count")


def test_size_grid():
    assert gl.size_grid(1000, 10.0, 10**6) == [1000, 10**4, 10**5, 10**6]
    assert gl.size_grid(5, 2.0, 44) == [5, 10, 20, 40]
    with pytest.raises(gl.ParameterError):
        gl.size_grid(0, 10.0, 100)
    with pytest.raises(gl.ParameterError):
        gl.size_grid(10, 1.0, 100)
    with pytest.raises(gl.ParameterError):
        gl.size_grid(10, 2.0, 5)


# ---------------------------------------------------------------------------
# run_series budget behaviour
# ---------------------------------------------------------------------------

def test_series_no_early_exit_method_exact_counts():
    series = gl.run_series("primes", "M0", 10**3, 10.0, 10**5, budget_seconds=1e9)
    assert [r.status for r in series.records] == ["completed"] * 3
    assert [r.op_count for r in series.records] == [
        gl.m0_mod_ops(10**3), gl.m0_mod_ops(10**4), gl.m0_mod_ops(10**5)
    ]
    rows = gl.growth_ratios(series, metric="op_count")
    assert abs(rows[1].ratio - 100.5) < 0.2
    assert abs(rows[2].ratio - 100.0) < 0.2


def test_series_skips_only_with_justifying_model():
    budget = 0.05
    series = gl.run_series("primes", "M2", 10**3, 10.0, 10**7, budget_seconds=budget)
    statuses = {r.status for r in series.records}
    assert statuses <= {"completed", "aborted_budget", "extrapolated"}
    extrapolated = [r for r in series.records if r.status == "extrapolated"]
    assert extrapolated, "a 0.05s budget must rule out the largest sizes"
    for r in extrapolated:
        assert r.model is not None
        assert gl.extrapolate(r.model, r.n) > budget
        assert r.op_count is None
        assert r.elapsed_seconds == pytest.approx(gl.extrapolate(r.model, r.n))
    assert series.records[-1].status == "extrapolated"  # 1e7 is hopeless
    # completed records carry measurements
    for r in series.completed():
        assert r.op_count is not None and r.elapsed_seconds > 0


def test_series_drowned_budget_extrapolates_after_first_record():
    series = gl.run_series("primes", "M2", 10**3, 10.0, 10**6, budget_seconds=1e-6)
    first, rest = series.records[0], series.records[1:]
    assert first.status in ("completed", "aborted_budget")
    assert rest, "grid has more than one size"
    for r in rest:
        assert r.status == "extrapolated"
        assert r.model is not None


def test_series_aborts_runaway_run():
    # No model exists for the first size, so the run starts, then the 3x
    # budget deadline cancels it mid-flight.
    budget = 0.2
    series = gl.run_series("primes", "M1", 10**6, 10.0, 10**6, budget_seconds=budget)
    (record,) = series.records
    assert record.status == "aborted_budget"
    assert record.op_count is None
    # cancelled shortly after the deadline: allow poll latency slack
    assert record.elapsed_seconds >= 3 * budget * 0.9
    assert record.elapsed_seconds < 3 * budget + 2.0


def test_series_repeats_r1_extrapolates_to_hours_while_r2_runs():
    m = 100
    r1 = gl.run_series(
        "repeats", "R1", 10**4, 10.0, 10**7, m=m, budget_seconds=30.0
    )
    by_n = {r.n: r for r in r1.records}
    assert by_n[10**4].status == "completed"
    assert by_n[10**7].status == "extrapolated"
    assert by_n[10**7].elapsed_seconds > 3600.0, "quadratic growth: hours at 1e7"
    # the sorting method finishes the same size in seconds
    text = gl.generate_text("random", 10**7, alphabet_size=256, seed=20240801)
    r2 = gl.count_r2(text, m)
    assert r2.elapsed_seconds < 30.0
    r3 = gl.count_r3(text, m, seed=1)
    assert r3.nrepeats == r2.nrepeats


def test_series_validation():
    with pytest.raises(gl.ParameterError):
        gl.run_series("primes", "Q9", 10, 10.0, 100)
    with pytest.raises(gl.ParameterError):
        gl.run_series("repeats", "R1", 10, 10.0, 100)  # missing m
    with pytest.raises(gl.ParameterError):
        gl.run_series("primes", "M2", 10, 10.0, 100, budget_seconds=0.0)
    with pytest.raises(gl.ParameterError):
        gl.run_series("nonesuch", "M2", 10, 10.0, 100)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def test_csv_round_trip_identity():
    series = gl.run_series("primes", "M2", 10**3, 10.0, 10**5, budget_seconds=1e9)
    series.records.append(
        gl.BenchRecord(
            task="primes", method_id="M2", n=10**9, m=None,
            elapsed_seconds=123.456, op_count=None, status="extrapolated",
            model=gl.PowerLawModel(1.4, -8.0, 3, 0.01),
        )
    )
    buf = io.StringIO()
    gl.emit_csv(series, buf)
    buf.seek(0)
    parsed = gl.parse_csv(buf)
    assert len(parsed) == len(series.records)
    for a, b in zip(series.records, parsed):
        assert (a.task, a.method_id, a.n, a.m, a.status) == (
            b.task, b.method_id, b.n, b.m, b.status
        )
        assert a.elapsed_seconds == b.elapsed_seconds  # repr round-trip, exact
        assert a.op_count == b.op_count


def test_csv_empty_series_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    series = gl.BenchSeries(task="primes", method_id="M2", m=None, budget_seconds=1.0)
    gl.emit_csv(series, str(path))
    assert path.read_text().strip() == "task,method,n,m,elapsed_seconds,op_count,status"
    assert gl.parse_csv(str(path)) == []


def test_csv_growth_table_and_errors(tmp_path):
    rows = [gl.GrowthRow(n=10, value=5.0, ratio=None), gl.GrowthRow(100, 50.0, 10.0)]
    path = tmp_path / "growth.csv"
    gl.emit_csv(rows, str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "n,value,ratio_to_previous"
    assert lines[1].startswith("10,5.0,")
    with pytest.raises(OSError) as exc:
        gl.emit_csv(rows, str(tmp_path / "no-such-dir" / "x.csv"))
    assert "x.csv" in str(exc.value)
    bad = tmp_path / "bad.csv"
    bad.write_text("nonsense,header\n1,2\n")
    with pytest.raises(gl.ParameterError):
        gl.parse_csv(str(bad))


# ---------------------------------------------------------------------------
# Transcripts
# ---------------------------------------------------------------------------

def test_segmented_transcript_fields_exact():
    report = gl.PrimesReport(
        method_id="M5", n=10**12, nprimes=37_607_912_018,
        last_prime=999_999_999_989, mod_ops=0, sieve_ops=123,
        memory_bytes=2**23 + 16 * 78_497, elapsed_seconds=1767.173,
        sqrt_nprimes=78_497, sqrt_last_prime=999_983,
    )
    lines = bench.emit_transcript(report).splitlines()
    assert lines[1] == "Primes 5: Segmented sieve, bells and whistles"
    assert lines[0] == lines[2] == "-" * len(lines[1])
    assert lines[3] == "finding primes up to n    = 1,000,000,000,000 = 1e+12"
    assert lines[4] == "number of primes < sqrtn  = 78,497"
    assert lines[5] == "last of those primes      = 999,983"
    assert lines[6] == "memory space used         = 9.2 MiB"
    assert lines[7] == "number of primes < n      = 37,607,912,018"
    assert lines[8] == "density of primes         = 3.76%"
    assert lines[9] == "last of those primes      = 999,999,999,989"
    assert lines[10] == "computation time          = 1767.173 seconds"
    assert len(lines) == 11


def test_repeats_transcript_fields_exact():
    report = gl.RepeatsReport(
        method_id="R3", n=200_000_000, m=50, nrepeats=10_189_540,
        char_cmps=1, memory_bytes=8 * (200_000_000 - 50 + 1),
        elapsed_seconds=26.253, source="wsj.txt",
    )
    lines = bench.emit_transcript(report).splitlines()
    assert lines[1] == "Repeats 3: Build suffix array using ternary quicksort"
    assert lines[3] == "text size n         = 200,000,000 = 2e+08 from wsj.txt"
    assert lines[4] == "repeat length m     = 50"
    assert lines[5] == "memory space used   = 1525.9 MiB"
    assert lines[6] == "number of m-repeats = 10,189,540"
    assert lines[7] == "computation time    = 26.253 seconds"
    assert len(lines) == 8


def test_transcript_small_numbers_have_no_shorthand():
    report = gl.count_m2(1000)
    text = bench.emit_transcript(report)
    assert "finding primes up to n    = 1,000\n" in text + "\n"
    assert "1e+03" not in text
    assert "mod operations            = 5,287" in text


def test_transcript_live_run_matches_known_fields():
    report = gl.count_m5(gl.SieveConfig(n=10**6, segsize=2**16))
    lines = bench.emit_transcript(report).splitlines()
    assert "finding primes up to n    = 1,000,000 = 1e+06" in lines
    assert "number of primes < sqrtn  = 167" in lines
    assert "number of primes < n      = 78,498" in lines
    assert "density of primes         = 7.85%" in lines
    assert "last of those primes      = 999,983" in lines


def test_format_series_summary():
    series = gl.run_series("primes", "M2", 10**3, 10.0, 10**4, budget_seconds=1e9)
    out = bench.format_series(series)
    assert "primes M2" in out
    assert "5,287" in out and "117,526" in out
    assert "x22.2" in out
