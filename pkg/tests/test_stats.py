import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solitaire_lab.errors import AlignmentError, InsufficientDataError, ModulusMismatchError
from solitaire_lab.stats import StreamStats, TopCardHistogram, top_card_on_repeat, traces_to_arrays


def brute_counts(stream, modulus, max_distance):
    """Independent quadratic oracle for every counter the accumulator keeps."""
    n = len(stream)
    freq = [0] * (modulus + 1)
    for v in stream:
        freq[v] += 1
    repeats = [0] * (max_distance + 1)
    for d in range(1, max_distance + 1):
        for i in range(n - d):
            if stream[i] == stream[i + d]:
                repeats[d] += 1
    windows = {r: 0 for r in (3, 4, 5)}
    for r in (3, 4, 5):
        for i in range(n - r + 1):
            if len(set(stream[i : i + r])) == 1:
                windows[r] += 1
    return freq[1:], repeats, windows


def test_three_ones():
    st_ = StreamStats(26).accumulate([1, 1, 1])
    assert int(st_.repeats[1]) == 2
    assert int(st_.repeats[2]) == 1
    assert st_.window_counts[3] == 1
    assert st_.window_counts[4] == 0


def test_alternating_pair():
    st_ = StreamStats(26).accumulate([1, 2, 1, 2])
    assert st_.repeat_rate(2) == 1.0
    assert st_.repeat_rate(1) == 0.0


def test_constant_stream_tuple_rates():
    st_ = StreamStats(26).accumulate([7] * 64)
    tr = st_.tuple_rates()
    assert tr.rate3 == tr.rate4 == tr.rate5 == 1.0
    assert tr.ratio_1_3 == tr.ratio_3_4 == tr.ratio_4_5 == 1.0


stream_strategy = st.lists(st.integers(min_value=1, max_value=26), min_size=0, max_size=400)


@given(stream_strategy, st.integers(min_value=1, max_value=8), st.data())
@settings(max_examples=40)
def test_chunked_accumulation_matches_oracle(stream, max_distance, data):
    st_ = StreamStats(26, max_distance)
    rest = stream
    while rest:
        cut = data.draw(st.integers(min_value=1, max_value=len(rest)))
        st_.accumulate(rest[:cut])
        rest = rest[cut:]
    freq, repeats, windows = brute_counts(stream, 26, max_distance)
    assert st_.length == len(stream)
    assert st_.freq.tolist() == freq
    assert st_.repeats.tolist()[1:] == repeats[1:]
    assert st_.window_counts == windows


@given(stream_strategy, stream_strategy)
@settings(max_examples=40)
def test_merge_equals_sum_of_part_oracles(a_stream, b_stream):
    a = StreamStats(26, 5).accumulate(a_stream)
    b = StreamStats(26, 5).accumulate(b_stream)
    merged = a.merge(b)
    fa, ra, wa = brute_counts(a_stream, 26, 5)
    fb, rb, wb = brute_counts(b_stream, 26, 5)
    assert merged.length == len(a_stream) + len(b_stream)
    assert merged.freq.tolist() == [x + y for x, y in zip(fa, fb)]
    assert merged.repeats.tolist()[1:] == [x + y for x, y in zip(ra[1:], rb[1:])]
    assert merged.window_counts == {r: wa[r] + wb[r] for r in (3, 4, 5)}


def test_merge_continues_right_stream():
    a = StreamStats(26).accumulate([5, 5])
    b = StreamStats(26).accumulate([9])
    merged = a.merge(b).accumulate([9])
    # the 9,9 pair is inside the continued right stream; nothing bridges to a
    assert int(merged.repeats[1]) == 1 + 1


def test_merge_guards():
    with pytest.raises(ModulusMismatchError):
        StreamStats(26).merge(StreamStats(54))
    with pytest.raises(ModulusMismatchError):
        StreamStats(26, 5).merge(StreamStats(26, 6))
    with pytest.raises(TypeError):
        StreamStats(26).merge([1, 2, 3])


def test_accumulate_guards():
    st_ = StreamStats(26)
    with pytest.raises(ModulusMismatchError):
        st_.accumulate([0, 1])
    with pytest.raises(ModulusMismatchError):
        st_.accumulate([27])
    with pytest.raises(ValueError):
        st_.accumulate(np.zeros((2, 2), np.uint8))
    with pytest.raises(ValueError):
        StreamStats(1)
    with pytest.raises(ValueError):
        StreamStats(26, 0)


def test_rate_guards():
    st_ = StreamStats(26, 4).accumulate([1, 2, 3])
    with pytest.raises(ValueError):
        st_.repeat_rate(5)
    with pytest.raises(InsufficientDataError):
        st_.repeat_rate(3)
    with pytest.raises(InsufficientDataError):
        st_.tuple_rates()
    with pytest.raises(InsufficientDataError):
        st_.uniformity_chi2()


def test_chi2_closed_forms():
    m = 26
    uniform = StreamStats(m).accumulate(list(range(1, m + 1)) * 100)
    stat, dof = uniform.uniformity_chi2()
    assert stat == 0.0 and dof == m - 1
    constant = StreamStats(m).accumulate([1] * (100 * m))
    stat, dof = constant.uniformity_chi2()
    assert stat == pytest.approx((m - 1) * 100 * m)


def test_distance_profile_rows():
    st_ = StreamStats(26, 3).accumulate([1, 1, 2, 2, 1, 1, 1])
    rows = st_.distance_profile()
    assert [d for d, _, _ in rows] == [1, 2, 3]
    assert rows[0][1] == st_.repeat_rate(1)
    assert all(err > 0 for _, rate, err in rows if 0 < rate < 1)


def test_footprint_constant_and_tail_bounded():
    st_ = StreamStats(26, 26)
    baseline = st_.footprint_bytes()
    rng = np.random.default_rng(5)
    for _ in range(40):
        st_.accumulate(rng.integers(1, 27, int(rng.integers(1, 5000))))
        assert st_.footprint_bytes() == baseline
        assert st_._tail.shape[0] <= 26


def test_large_stream_constant_memory():
    # 2**27 symbols through a fixed-size accumulator
    st_ = StreamStats(26, 26)
    baseline = st_.footprint_bytes()
    rng = np.random.default_rng(11)
    total = 0
    chunk = 1 << 22
    while total < (1 << 27):
        st_.accumulate(rng.integers(1, 27, chunk, dtype=np.int64))
        total += chunk
        assert st_.footprint_bytes() == baseline
    assert st_.length == 1 << 27
    assert st_.repeat_rate(1) == pytest.approx(1 / 26, abs=5e-5)


def test_tuple_rate_bounded_by_pair_rate():
    rng = np.random.default_rng(7)
    st_ = StreamStats(26).accumulate(rng.integers(1, 5, 20_000))
    tr = st_.tuple_rates()
    assert tr.rate3 <= st_.repeat_rate(1)


def test_top_card_histogram_basics():
    top = np.array([10, 20, 20, 5, 5], np.uint8)
    raw = np.array([4, 9, 9, 9, 2], np.uint8)
    hist = top_card_on_repeat(top, raw)
    # repeats at steps 2 and 3 (values 9,9,9); tops recorded are 20 and 5
    assert hist.total == 2
    assert hist.counts[20] == 1 and hist.counts[5] == 1
    empty = top_card_on_repeat(np.empty(0, np.uint8), np.empty(0, np.uint8))
    assert empty.total == 0
    with pytest.raises(AlignmentError):
        top_card_on_repeat(top, raw[:-1])


def test_traces_to_arrays():
    from solitaire_lab.cipher import CipherState, keystream_traced
    from solitaire_lab.deck import shuffle

    ks, traces = keystream_traced(CipherState(shuffle(12)), 30)
    top, raw = traces_to_arrays(traces)
    assert tuple(int(v) for v in raw) == ks.raw
    assert len(top) == 30


class TestBigTracedRun:
    """Shared 1e7-step instrumented run: story fraction and the top-card shape."""

    def test_story_fraction_near_model(self, traced_ten_million):
        _, _, flag = traced_ten_million
        fraction = float(np.count_nonzero(flag)) / flag.shape[0]
        assert abs(fraction - 0.00558) <= 0.0002

    def test_flag_predicts_repeat_when_no_wrap_possible(self, traced_ten_million):
        raw, _, flag = traced_ten_million
        # flagged steps predict a repeat of the previous raw value unless a
        # joker wrap interferes; require a dominant hit rate
        idx = np.where(flag[1:])[0] + 1
        hits = np.count_nonzero(raw[idx] == raw[idx - 1])
        assert hits / idx.shape[0] > 0.9

    def test_histogram_totals_match_repeats(self, traced_ten_million):
        raw, top, _ = traced_ten_million
        hist = top_card_on_repeat(top, raw)
        assert hist.total == int(np.count_nonzero(raw[1:] == raw[:-1]))

    def test_small_values_dominate(self, traced_ten_million):
        raw, top, _ = traced_ten_million
        hist = top_card_on_repeat(top, raw)
        assert hist.counts[1:11].min() > hist.counts[45:55].max()

    def test_level_shift_at_band_boundary(self, traced_ten_million):
        raw, top, _ = traced_ten_million
        hist = top_card_on_repeat(top, raw)
        assert hist.level_shift_z((20, 28), (29, 40)) >= 3.0
