"""Repeat-counting methods: frozen example values, four-way and brute-force
agreement, comparison-count arithmetic, suffix-index invariants, randomized
pivot behaviour, and input validation."""

import random

import pytest

import growthlab as gl
from oracles import ShadowTernaryQuicksort, brute_repeats, brute_sorted_offsets

MERRY = "merry.mary.marry.me"
# brute-force hash-set oracle values for the sample phrase, all m
MERRY_EXPECTED = {1: 13, 2: 10, 3: 7, 4: 5, 5: 3, 6: 1, 7: 0}


def _all_counts(text, m, seed=1234):
    return [
        gl.count_r0(text, m).nrepeats,
        gl.count_r1(text, m).nrepeats,
        gl.count_r2(text, m).nrepeats,
        gl.count_r3(text, m, seed=seed).nrepeats,
    ]


# ---------------------------------------------------------------------------
# Frozen examples
# ---------------------------------------------------------------------------

def test_sample_phrase_all_methods_all_m():
    text = gl.Text.from_str(MERRY)
    for m, want in MERRY_EXPECTED.items():
        counts = _all_counts(text, m)
        assert counts == [want] * 4, (m, counts)
        assert brute_repeats(text.data, m) == want


def test_tiny_examples():
    assert _all_counts(gl.Text.from_str("aaaa"), 2) == [2] * 4
    assert _all_counts(gl.Text.from_str("abab"), 2) == [1] * 4
    assert _all_counts(gl.Text.from_str("abcd"), 2) == [0] * 4


def test_all_equal_text():
    text = gl.generate_text("all-equal", 1000)
    assert gl.count_r2(text, 10).nrepeats == 990
    assert gl.count_r3(text, 10, seed=5).nrepeats == 990
    # R1 on all-equal text: every later offset matches offset 0 at exactly
    # m character comparisons
    rep = gl.count_r1(text, 10)
    assert rep.nrepeats == 990
    assert rep.char_cmps == 10 * 990


# ---------------------------------------------------------------------------
# Randomized agreement with the brute-force oracle
# ---------------------------------------------------------------------------

def test_randomized_cases_agree_with_brute_force():
    rng = random.Random(20240801)
    for case in range(500):
        n = rng.randrange(1, 200)
        m = rng.randrange(1, min(n, 8) + 1)
        alphabet = rng.choice([2, 4, 8, 256])
        text = gl.generate_text("random", n, alphabet_size=alphabet, seed=case)
        want = brute_repeats(text.data, m)
        assert gl.count_r1(text, m).nrepeats == want, (case, n, m, alphabet)
        assert gl.count_r3(text, m, seed=case).nrepeats == want, (case, n, m)
        if case % 5 == 0:
            assert gl.count_r0(text, m).nrepeats == want
            assert gl.count_r2(text, m).nrepeats == want


def test_structured_texts_four_way_agreement():
    texts = [
        gl.generate_text("random", 2_000, alphabet_size=2, seed=1),
        gl.generate_text("random", 2_000, alphabet_size=4, seed=2),
        gl.generate_text("random", 2_000, alphabet_size=256, seed=3),
        gl.generate_text("all-equal", 1_500),
        gl.generate_text("periodic", 1_500, period=3),
    ]
    for text in texts:
        for m in (1, 2, 5, 50):
            counts = _all_counts(text, m)
            assert counts == [counts[0]] * 4, (text.source, m, counts)
            assert counts[0] == brute_repeats(text.data, m)


def test_monotone_in_m():
    text = gl.generate_text("random", 800, alphabet_size=4, seed=11)
    values = [gl.count_r2(text, m).nrepeats for m in range(1, 13)]
    assert all(a >= b for a, b in zip(values, values[1:])), values


# ---------------------------------------------------------------------------
# Comparison counts
# ---------------------------------------------------------------------------

def test_r0_comparison_closed_form():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randrange(2, 300)
        m = rng.randrange(1, n + 1)
        rep = gl.count_r0(gl.generate_text("random", n, seed=n), m)
        k = n - m
        assert rep.char_cmps == m * k * (k + 1) // 2


def test_r1_cheap_pairs_on_large_alphabet():
    text = gl.generate_text("random", 3_000, alphabet_size=256, seed=5)
    rep = gl.count_r1(text, 50)
    pairs = (text.n - 50) * (text.n - 50 + 1) // 2
    assert rep.char_cmps / pairs < 2.0
    assert rep.char_cmps >= pairs  # at least one comparison per pair


def test_r1_never_exceeds_r0():
    for seed in range(5):
        text = gl.generate_text("random", 400, alphabet_size=4, seed=seed)
        for m in (1, 3, 9):
            assert gl.count_r1(text, m).char_cmps <= gl.count_r0(text, m).char_cmps


# ---------------------------------------------------------------------------
# Suffix index
# ---------------------------------------------------------------------------

def test_suffix_index_matches_brute_sort():
    rng = random.Random(17)
    for case in range(100):
        n = rng.randrange(1, 120)
        m = rng.randrange(1, n + 1)
        text = gl.generate_text(
            "random", n, alphabet_size=rng.choice([2, 4, 256]), seed=1000 + case
        )
        idx = gl.build_suffix_index(text, m)
        got = idx.entries.tolist()
        assert sorted(got) == list(range(n - m + 1))  # permutation
        assert got == brute_sorted_offsets(text.data, m)  # order + stability


def test_suffix_index_small_frozen():
    idx = gl.build_suffix_index(gl.Text.from_str("abab"), 2)
    assert idx.entries.tolist() == [0, 2, 1]


def test_group_identity_on_sorted_index():
    # nrepeats == sum over equal-substring groups of (group size - 1)
    text = gl.generate_text("random", 1_000, alphabet_size=4, seed=23)
    m = 4
    idx = gl.build_suffix_index(text, m).entries.tolist()
    groups = {}
    for off in idx:
        groups.setdefault(bytes(text.data[off : off + m]), []).append(off)
    want = sum(len(g) - 1 for g in groups.values())
    assert gl.count_r2(text, m).nrepeats == want
    assert gl.count_r3(text, m, seed=2).nrepeats == want


# ---------------------------------------------------------------------------
# Ternary quicksort specifics
# ---------------------------------------------------------------------------

def test_r3_deterministic_given_seed_and_seed_recorded():
    text = gl.generate_text("random", 2_000, alphabet_size=8, seed=77)
    a = gl.count_r3(text, 5, seed=42)
    b = gl.count_r3(text, 5, seed=42)
    assert (a.nrepeats, a.char_cmps, a.pivot_seed) == (b.nrepeats, b.char_cmps, 42)
    c = gl.count_r3(text, 5, seed=43)
    assert c.nrepeats == a.nrepeats  # count is pivot-independent
    d = gl.count_r3(text, 5)  # fresh seed drawn and reported
    assert d.pivot_seed is not None
    assert d.nrepeats == a.nrepeats


def test_r3_shadow_implementation_and_zone_invariant():
    rng = random.Random(5)
    for case in range(50):
        n = rng.randrange(2, 150)
        m = rng.randrange(1, min(n, 6) + 1)
        text = gl.generate_text(
            "random", n, alphabet_size=rng.choice([2, 4, 16]), seed=5000 + case
        )
        shadow = ShadowTernaryQuicksort(text.data, m, seed=case).run()
        assert gl.count_r3(text, m, seed=case).nrepeats == shadow
        assert shadow == brute_repeats(text.data, m)


def test_r3_stack_growth_on_deep_input():
    # all-equal text forces the equal zone to descend m levels; a long m
    # exercises the grow-and-resume path of the explicit stack
    text = gl.generate_text("all-equal", 5_000)
    rep = gl.count_r3(text, 3_000, seed=9)
    assert rep.nrepeats == 5_000 - 3_000  # size-1 of the single group
    assert rep.memory_bytes == 8 * (5_000 - 3_000 + 1)


# ---------------------------------------------------------------------------
# Reports, texts, validation
# ---------------------------------------------------------------------------

def test_memory_accounting():
    text = gl.generate_text("random", 3_000, seed=5)
    assert gl.count_r0(text, 50).memory_bytes == 0
    assert gl.count_r1(text, 50).memory_bytes == 0
    assert gl.count_r2(text, 50).memory_bytes == 8 * (3_000 - 50 + 1)
    assert gl.count_r3(text, 50, seed=1).memory_bytes == 8 * (3_000 - 50 + 1)


def test_m_equals_n_edge():
    text = gl.Text.from_str("xyz")
    assert _all_counts(text, 3) == [0] * 4


def test_parameter_validation():
    text = gl.Text.from_str("abc")
    for bad_m in (0, -1, 4):
        for counter in (gl.count_r0, gl.count_r1, gl.count_r2):
            with pytest.raises(gl.ParameterError):
                counter(text, bad_m)
        with pytest.raises(gl.ParameterError):
            gl.count_r3(text, bad_m)
    with pytest.raises(gl.ParameterError):
        gl.count_r1(gl.Text(b""), 1)  # empty text has no offsets
    with pytest.raises(gl.ParameterError):
        gl.generate_text("random", 10, alphabet_size=0)
    with pytest.raises(gl.ParameterError):
        gl.generate_text("nonesuch", 10)


def test_generate_text_deterministic_and_labelled():
    a = gl.generate_text("random", 500, alphabet_size=4, seed=9)
    b = gl.generate_text("random", 500, alphabet_size=4, seed=9)
    c = gl.generate_text("random", 500, alphabet_size=4, seed=10)
    assert a.data == b.data
    assert a.data != c.data
    assert max(a.data) < 4
    assert "seed=9" in a.source
    assert gl.generate_text("periodic", 5, period=3).data == b"abcab"
    assert gl.generate_text("all-equal", 4).data == b"aaaa"


def test_read_text_prefix(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_bytes(b"abcdefghij")
    whole = gl.read_text(str(path))
    assert whole.data == b"abcdefghij"
    assert whole.source == "corpus.txt"
    head = gl.read_text(str(path), max_bytes=4)
    assert head.data == b"abcd"
    with pytest.raises(OSError):
        gl.read_text(str(tmp_path / "missing.txt"))


def test_cancellation_in_pair_scan():
    token = gl.CancelToken()
    token.cancel()
    text = gl.generate_text("random", 200_000, seed=1)
    with pytest.raises(gl.RunAborted):
        gl.count_r1(text, 20, cancel=token)
